#include "artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "errors.hpp"

namespace hjbtk {

std::string format_double_17(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json& Json::operator[](const std::string& key) {
  if (type_ == Type::null) type_ = Type::object;
  if (type_ != Type::object) throw Error(errc::internal, "json: not an object");
  for (auto& [k, v] : obj_)
    if (k == key) return v;
  obj_.emplace_back(key, Json());
  return obj_.back().second;
}

void Json::push_back(Json v) {
  if (type_ == Type::null) type_ = Type::array;
  if (type_ != Type::array) throw Error(errc::internal, "json: not an array");
  arr_.push_back(std::move(v));
}

namespace {

void dump_string(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

}  // namespace

void Json::dump_to(std::string& out, int indent, int depth) const {
  const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  const std::string padc(static_cast<std::size_t>(indent) * depth, ' ');
  switch (type_) {
    case Type::null: out += "null"; break;
    case Type::boolean: out += bool_ ? "true" : "false"; break;
    case Type::number: out += format_double_17(num_); break;
    case Type::string: dump_string(out, str_); break;
    case Type::array: {
      if (arr_.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      for (std::size_t i = 0; i < arr_.size(); ++i) {
        out += pad;
        arr_[i].dump_to(out, indent, depth + 1);
        if (i + 1 < arr_.size()) out += ',';
        out += '\n';
      }
      out += padc + "]";
      break;
    }
    case Type::object: {
      if (obj_.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      for (std::size_t i = 0; i < obj_.size(); ++i) {
        out += pad;
        dump_string(out, obj_[i].first);
        out += ": ";
        obj_[i].second.dump_to(out, indent, depth + 1);
        if (i + 1 < obj_.size()) out += ',';
        out += '\n';
      }
      out += padc + "}";
      break;
    }
  }
}

std::string Json::dump(int indent) const {
  std::string out;
  dump_to(out, indent, 0);
  out += '\n';
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(errc::io, "cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error(errc::io, "failed writing '" + path + "'");
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    out += header[i];
    out += i + 1 < header.size() ? "," : "";
  }
  out += '\n';
  char buf[40];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out += buf;
      if (i + 1 < row.size()) out += ',';
    }
    out += '\n';
  }
  write_text_file(path, out);
}

namespace {

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

}  // namespace

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel,
                     const std::vector<SvgSeries>& series) {
  const double W = 720, H = 480, ml = 80, mr = 30, mt = 50, mb = 60;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (first) {
        xmin = xmax = x;
        ymin = ymax = y;
        first = false;
      } else {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  const double xpad = 0.05 * (xmax - xmin), ypad = 0.08 * (ymax - ymin);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;
  const auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  const auto Y = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt6(W) + "\" height=\"" +
         fmt6(H) + "\" viewBox=\"0 0 " + fmt6(W) + " " + fmt6(H) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt6(W / 2) + "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\" "
         "font-family=\"sans-serif\">" + title + "</text>\n";
  // Axes.
  svg += "<line x1=\"" + fmt6(ml) + "\" y1=\"" + fmt6(H - mb) + "\" x2=\"" + fmt6(W - mr) +
         "\" y2=\"" + fmt6(H - mb) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt6(ml) + "\" y1=\"" + fmt6(mt) + "\" x2=\"" + fmt6(ml) + "\" y2=\"" +
         fmt6(H - mb) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 5.0;
    const double fy = ymin + (ymax - ymin) * i / 5.0;
    svg += "<line x1=\"" + fmt6(X(fx)) + "\" y1=\"" + fmt6(H - mb) + "\" x2=\"" + fmt6(X(fx)) +
           "\" y2=\"" + fmt6(H - mb + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt6(X(fx)) + "\" y=\"" + fmt6(H - mb + 20) +
           "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" + fmt6(fx) +
           "</text>\n";
    svg += "<line x1=\"" + fmt6(ml - 5) + "\" y1=\"" + fmt6(Y(fy)) + "\" x2=\"" + fmt6(ml) +
           "\" y2=\"" + fmt6(Y(fy)) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt6(ml - 8) + "\" y=\"" + fmt6(Y(fy) + 4) +
           "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" + fmt6(fy) +
           "</text>\n";
  }
  svg += "<text x=\"" + fmt6((ml + W - mr) / 2) + "\" y=\"" + fmt6(H - 15) +
         "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" + xlabel +
         "</text>\n";
  svg += "<text x=\"20\" y=\"" + fmt6((mt + H - mb) / 2) +
         "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" transform=\"rotate(-90 20 " +
         fmt6((mt + H - mb) / 2) + ")\">" + ylabel + "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kSeriesColors[si % 8];
    std::string pts;
    for (const auto& [x, y] : series[si].points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      pts += fmt6(X(x)) + "," + fmt6(Y(y)) + " ";
    }
    svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1.8\"/>\n";
    for (const auto& [x, y] : series[si].points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      svg += "<circle cx=\"" + fmt6(X(x)) + "\" cy=\"" + fmt6(Y(y)) + "\" r=\"2.6\" fill=\"" +
             color + "\"/>\n";
    }
    const double ly = mt + 16.0 * static_cast<double>(si);
    svg += "<rect x=\"" + fmt6(W - mr - 150) + "\" y=\"" + fmt6(ly - 9) +
           "\" width=\"12\" height=\"12\" fill=\"" + color + "\"/>\n";
    svg += "<text x=\"" + fmt6(W - mr - 132) + "\" y=\"" + fmt6(ly + 1) +
           "\" font-size=\"11\" font-family=\"sans-serif\">" + series[si].label + "</text>\n";
  }
  svg += "</svg>\n";
  write_text_file(path, svg);
}

}  // namespace hjbtk
