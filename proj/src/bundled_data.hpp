#pragma once

#include <string_view>

namespace lbdx::corpus::bundled {

// Contents of data/stopwords_en.txt and data/british_american.tsv, captured at configure time.
extern const std::string_view kStopWords;
extern const std::string_view kBritishAmerican;

}  // namespace lbdx::corpus::bundled
