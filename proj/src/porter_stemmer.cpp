#include "lbdx/porter_stemmer.hpp"

namespace lbdx::corpus {
namespace {

// Direct port of the reference implementation. `k_` is the index of the last
// character of the current stem and `j_` the end of the prefix preceding a
// matched suffix.
class PorterStemmer {
public:
    explicit PorterStemmer(std::string_view word) : b_(word), k_(static_cast<int>(word.size()) - 1) {}

    std::string run() {
        if (k_ <= 1) {
            return b_;
        }
        step1ab();
        if (k_ > 0) {
            step1c();
            step2();
            step3();
            step4();
            step5();
        }
        return b_.substr(0, static_cast<std::size_t>(k_ + 1));
    }

private:
    bool cons(int i) const {
        switch (b_[i]) {
        case 'a':
        case 'e':
        case 'i':
        case 'o':
        case 'u':
            return false;
        case 'y':
            return i == 0 ? true : !cons(i - 1);
        default:
            return true;
        }
    }

    // Number of VC sequences in b_[0..j_].
    int measure() const {
        int n = 0;
        int i = 0;
        for (;;) {
            if (i > j_) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        for (;;) {
            for (;;) {
                if (i > j_) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            for (;;) {
                if (i > j_) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j_; ++i) {
            if (!cons(i)) return true;
        }
        return false;
    }

    bool double_consonant(int j) const {
        if (j < 1) return false;
        if (b_[j] != b_[j - 1]) return false;
        return cons(j);
    }

    // consonant-vowel-consonant ending at i, where the final consonant is not w, x or y.
    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        const char ch = b_[i];
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends(std::string_view s) {
        const int length = static_cast<int>(s.size());
        if (length > k_ + 1) return false;
        if (std::string_view(b_).substr(static_cast<std::size_t>(k_ - length + 1), s.size()) != s) return false;
        j_ = k_ - length;
        return true;
    }

    void set_to(std::string_view s) {
        b_.replace(static_cast<std::size_t>(j_ + 1), std::string::npos, s);
        k_ = j_ + static_cast<int>(s.size());
    }

    void replace_if_measured(std::string_view s) {
        if (measure() > 0) set_to(s);
    }

    void step1ab() {
        if (b_[k_] == 's') {
            if (ends("sses")) {
                k_ -= 2;
            } else if (ends("ies")) {
                set_to("i");
            } else if (b_[k_ - 1] != 's') {
                --k_;
            }
        }
        if (ends("eed")) {
            if (measure() > 0) --k_;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k_ = j_;
            if (ends("at")) {
                set_to("ate");
            } else if (ends("bl")) {
                set_to("ble");
            } else if (ends("iz")) {
                set_to("ize");
            } else if (double_consonant(k_)) {
                --k_;
                const char ch = b_[k_];
                if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
            } else {
                j_ = k_;
                if (measure() == 1 && cvc(k_)) set_to("e");
            }
        }
        b_.resize(static_cast<std::size_t>(k_ + 1));
    }

    void step1c() {
        if (ends("y") && vowel_in_stem()) b_[k_] = 'i';
    }

    void step2() {
        switch (b_[k_ - 1]) {
        case 'a':
            if (ends("ational")) { replace_if_measured("ate"); break; }
            if (ends("tional")) { replace_if_measured("tion"); break; }
            break;
        case 'c':
            if (ends("enci")) { replace_if_measured("ence"); break; }
            if (ends("anci")) { replace_if_measured("ance"); break; }
            break;
        case 'e':
            if (ends("izer")) { replace_if_measured("ize"); break; }
            break;
        case 'l':
            if (ends("bli")) { replace_if_measured("ble"); break; }
            if (ends("alli")) { replace_if_measured("al"); break; }
            if (ends("entli")) { replace_if_measured("ent"); break; }
            if (ends("eli")) { replace_if_measured("e"); break; }
            if (ends("ousli")) { replace_if_measured("ous"); break; }
            break;
        case 'o':
            if (ends("ization")) { replace_if_measured("ize"); break; }
            if (ends("ation")) { replace_if_measured("ate"); break; }
            if (ends("ator")) { replace_if_measured("ate"); break; }
            break;
        case 's':
            if (ends("alism")) { replace_if_measured("al"); break; }
            if (ends("iveness")) { replace_if_measured("ive"); break; }
            if (ends("fulness")) { replace_if_measured("ful"); break; }
            if (ends("ousness")) { replace_if_measured("ous"); break; }
            break;
        case 't':
            if (ends("aliti")) { replace_if_measured("al"); break; }
            if (ends("iviti")) { replace_if_measured("ive"); break; }
            if (ends("biliti")) { replace_if_measured("ble"); break; }
            break;
        case 'g':
            if (ends("logi")) { replace_if_measured("log"); break; }
            break;
        default:
            break;
        }
        b_.resize(static_cast<std::size_t>(k_ + 1));
    }

    void step3() {
        switch (b_[k_]) {
        case 'e':
            if (ends("icate")) { replace_if_measured("ic"); break; }
            if (ends("ative")) { replace_if_measured(""); break; }
            if (ends("alize")) { replace_if_measured("al"); break; }
            break;
        case 'i':
            if (ends("iciti")) { replace_if_measured("ic"); break; }
            break;
        case 'l':
            if (ends("ical")) { replace_if_measured("ic"); break; }
            if (ends("ful")) { replace_if_measured(""); break; }
            break;
        case 's':
            if (ends("ness")) { replace_if_measured(""); break; }
            break;
        default:
            break;
        }
        b_.resize(static_cast<std::size_t>(k_ + 1));
    }

    void step4() {
        switch (b_[k_ - 1]) {
        case 'a':
            if (ends("al")) break;
            return;
        case 'c':
            if (ends("ance")) break;
            if (ends("ence")) break;
            return;
        case 'e':
            if (ends("er")) break;
            return;
        case 'i':
            if (ends("ic")) break;
            return;
        case 'l':
            if (ends("able")) break;
            if (ends("ible")) break;
            return;
        case 'n':
            if (ends("ant")) break;
            if (ends("ement")) break;
            if (ends("ment")) break;
            if (ends("ent")) break;
            return;
        case 'o':
            if (ends("ion") && j_ >= 0 && (b_[j_] == 's' || b_[j_] == 't')) break;
            if (ends("ou")) break;
            return;
        case 's':
            if (ends("ism")) break;
            return;
        case 't':
            if (ends("ate")) break;
            if (ends("iti")) break;
            return;
        case 'u':
            if (ends("ous")) break;
            return;
        case 'v':
            if (ends("ive")) break;
            return;
        case 'z':
            if (ends("ize")) break;
            return;
        default:
            return;
        }
        if (measure() > 1) {
            k_ = j_;
            b_.resize(static_cast<std::size_t>(k_ + 1));
        }
    }

    void step5() {
        j_ = k_;
        if (b_[k_] == 'e') {
            const int a = measure();
            if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
        }
        if (b_[k_] == 'l' && double_consonant(k_) && measure() > 1) --k_;
    }

    std::string b_;
    int k_;
    int j_ = 0;
};

}  // namespace

std::string porter_stem(std::string_view word) {
    return PorterStemmer(word).run();
}

}  // namespace lbdx::corpus
