#include "lbdx/render.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "lbdx/errors.hpp"

namespace lbdx::render {

namespace {

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string dot_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace

std::string class_color(corpus::ConceptClass c) {
    switch (c) {
    case corpus::ConceptClass::A:
        return "#d62728";
    case corpus::ConceptClass::B:
        return "#f2c200";
    case corpus::ConceptClass::C:
        return "#1f77b4";
    }
    return "#888888";
}

std::string entry_point_dot(const discovery::EntryPoint &ep, const corpus::Vocabulary &vocab) {
    std::ostringstream out;
    out << "graph entry_point_" << ep.id << " {\n";
    out << "  node [shape=ellipse, style=filled];\n";
    for (const auto &t : ep.member_tokens) {
        out << "  \"" << dot_escape(t) << "\" [label=\"" << dot_escape(vocab.surface(t)) << "\", class=\""
            << corpus::to_string(vocab.concept_class(t)) << "\", fillcolor=\"" << class_color(vocab.concept_class(t))
            << "\"];\n";
    }
    out << std::setprecision(17);
    for (const auto &e : ep.mst_edges) {
        out << "  \"" << dot_escape(e.u) << "\" -- \"" << dot_escape(e.v) << "\" [weight=" << e.distance << "];\n";
    }
    out << "}\n";
    return out.str();
}

std::string entry_point_svg(const discovery::EntryPoint &ep, const layout::LayoutResult &layout,
                            const corpus::Vocabulary &vocab, int size_px) {
    constexpr double kMargin = 40.0;
    constexpr double kMinFont = 10.0;
    constexpr double kMaxFont = 26.0;
    const double span = static_cast<double>(size_px) - 2 * kMargin;

    auto position = [&](const std::string &t) {
        auto it = layout.positions.find(t);
        if (it == layout.positions.end()) throw InvalidArgument("layout has no position for '" + t + "'");
        return std::pair{kMargin + it->second.x * span, kMargin + it->second.y * span};
    };

    int max_freq = 1;
    for (const auto &t : ep.member_tokens) max_freq = std::max(max_freq, vocab.stats(t).total_count);

    std::ostringstream out;
    out << std::fixed << std::setprecision(2);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size_px << "\" height=\"" << size_px
        << "\" viewBox=\"0 0 " << size_px << ' ' << size_px << "\">\n";
    out << "  <title>entry point " << ep.id << "</title>\n";
    out << "  <g stroke=\"#999999\" stroke-width=\"1.5\">\n";
    for (const auto &e : ep.mst_edges) {
        const auto [x1, y1] = position(e.u);
        const auto [x2, y2] = position(e.v);
        out << "    <line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2 << "\"/>\n";
    }
    out << "  </g>\n";
    out << "  <g font-family=\"sans-serif\" text-anchor=\"middle\" dominant-baseline=\"middle\">\n";
    for (const auto &t : ep.member_tokens) {
        const auto [x, y] = position(t);
        const auto &stats = vocab.stats(t);
        const auto cls = vocab.concept_class(t);
        const double font = kMinFont + (kMaxFont - kMinFont) * std::sqrt(static_cast<double>(stats.total_count) /
                                                                         static_cast<double>(max_freq));
        out << "    <text x=\"" << x << "\" y=\"" << y << "\" font-size=\"" << font << "\" fill=\"" << class_color(cls)
            << "\" data-token=\"" << xml_escape(t) << "\" data-class=\"" << corpus::to_string(cls)
            << "\" data-frequency=\"" << stats.total_count << "\">" << xml_escape(stats.most_common_form())
            << "</text>\n";
    }
    out << "  </g>\n</svg>\n";
    return out.str();
}

}  // namespace lbdx::render
