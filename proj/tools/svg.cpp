#include "svg.hpp"

#include <cstdio>
#include <sstream>

namespace hfol::svg {

namespace {

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string Plot::render(int width, int height) const
{
    const double left = 60, right = 20, top = 40, bottom = 50;
    const double pw = width - left - right, ph = height - top - bottom;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << num(width / 2.0) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(title) << "</text>\n";
    s << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\""
      << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        double fx = x0 + (x1 - x0) * t / 4.0, fy = y0 + (y1 - y0) * t / 4.0;
        s << "<text x=\"" << num(px(fx)) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\" "
          << "font-size=\"11\">" << num(fx) << "</text>\n";
        s << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(fy) + 4) << "\" text-anchor=\"end\" "
          << "font-size=\"11\">" << num(fy) << "</text>\n";
    }
    s << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(height - 10.0) << "\" text-anchor=\"middle\" "
      << "font-size=\"12\">" << escape(xlabel) << "</text>\n";
    s << "<text x=\"14\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" font-size=\"12\" "
      << "transform=\"rotate(-90 14 " << num(top + ph / 2) << ")\">" << escape(ylabel) << "</text>\n";
    for (const auto& [y, label] : hlines) {
        s << "<line x1=\"" << num(left) << "\" x2=\"" << num(left + pw) << "\" y1=\"" << num(py(y)) << "\" y2=\""
          << num(py(y)) << "\" stroke=\"#b22222\" stroke-dasharray=\"4 3\"/>\n";
        s << "<text x=\"" << num(left + pw - 4) << "\" y=\"" << num(py(y) - 4) << "\" text-anchor=\"end\" "
          << "font-size=\"10\" fill=\"#b22222\">" << escape(label) << "</text>\n";
    }
    for (const auto& ser : series) {
        s << "<polyline fill=\"none\" stroke=\"" << ser.stroke << "\" stroke-width=\"" << num(ser.width)
          << "\" points=\"";
        for (std::size_t i = 0; i < ser.points.size(); ++i)
            s << (i ? " " : "") << num(px(ser.points[i].first)) << ',' << num(py(ser.points[i].second));
        s << "\">";
        if (!ser.label.empty()) s << "<title>" << escape(ser.label) << "</title>";
        s << "</polyline>\n";
    }
    s << "</svg>\n";
    return s.str();
}

} // namespace hfol::svg
