#pragma once

#include <string>
#include <string_view>

namespace lbdx::corpus {

// Porter (1980) suffix-stripping stemmer, following the reference C
// implementation distributed by Martin Porter. Words of one or two
// characters are returned unchanged. Input is expected lowercase.
std::string porter_stem(std::string_view word);

}  // namespace lbdx::corpus
