#pragma once

#include <string>
#include <utility>
#include <vector>

namespace hjbtk {

// Minimal ordered JSON value for result artifacts. Numbers are serialized
// with 17 significant digits so reruns are byte-comparable and round-trip
// exactly; non-finite values are emitted as quoted tokens ("inf", "-inf",
// "nan") since JSON has no literal for them.
class Json {
 public:
  enum class Type { null, boolean, number, string, array, object };

  Json() = default;
  static Json object() { Json j; j.type_ = Type::object; return j; }
  static Json array() { Json j; j.type_ = Type::array; return j; }
  Json(bool b) : type_(Type::boolean), bool_(b) {}
  Json(double v) : type_(Type::number), num_(v) {}
  Json(int v) : Json(static_cast<double>(v)) {}
  Json(std::size_t v) : Json(static_cast<double>(v)) {}
  Json(const char* s) : type_(Type::string), str_(s) {}
  Json(std::string s) : type_(Type::string), str_(std::move(s)) {}

  // Object access; creates the key on first use (insertion order kept).
  Json& operator[](const std::string& key);
  void push_back(Json v);

  std::string dump(int indent = 2) const;

 private:
  void dump_to(std::string& out, int indent, int depth) const;

  Type type_ = Type::null;
  bool bool_ = false;
  double num_ = 0.0;
  std::string str_;
  std::vector<Json> arr_;
  std::vector<std::pair<std::string, Json>> obj_;
};

std::string format_double_17(double v);

void write_text_file(const std::string& path, const std::string& content);

// CSV with a header row; all numbers at 17 significant digits.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

// Self-contained little line chart (axes, ticks, legend, one polyline per
// series). Enough for convergence plots; not a plotting library.
void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel,
                     const std::vector<SvgSeries>& series);

}  // namespace hjbtk
