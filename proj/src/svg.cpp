#include "detent/svg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "detent/error.hpp"

namespace detent {

namespace {

constexpr double kPi = std::numbers::pi;

// x' = a x + c y + e, y' = b x + d y + f
struct Affine {
  double a = 1, b = 0, c = 0, d = 1, e = 0, f = 0;

  Point2 apply(Point2 p) const { return {a * p.x + c * p.y + e, b * p.x + d * p.y + f}; }
  Affine operator*(const Affine& o) const {
    return {a * o.a + c * o.b,     b * o.a + d * o.b,     a * o.c + c * o.d,
            b * o.c + d * o.d,     a * o.e + c * o.f + e, b * o.e + d * o.f + f};
  }
  double max_scale() const {
    const double s = (a * a + b * b + c * c + d * d) / 2.0;
    const double det = a * d - b * c;
    return std::sqrt(s + std::sqrt(std::max(0.0, s * s - det * det)));
  }
};

[[noreturn]] void parse_error(const std::string& what) {
  throw Error(ErrorCode::svg_parse, "svg: " + what);
}

// ---------------------------------------------------------------------------
// Minimal XML tag scanner.

struct Tag {
  std::string name;
  std::map<std::string, std::string> attrs;
  bool closing = false;
  bool self_closing = false;

  std::string attr(const std::string& key) const {
    auto it = attrs.find(key);
    return it == attrs.end() ? std::string{} : it->second;
  }
  bool has(const std::string& key) const { return attrs.count(key) != 0; }
};

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    const auto semi = s.find(';', i);
    if (semi == std::string_view::npos) {
      out.push_back('&');
      continue;
    }
    const auto ent = s.substr(i + 1, semi - i - 1);
    if (ent == "amp") out.push_back('&');
    else if (ent == "lt") out.push_back('<');
    else if (ent == "gt") out.push_back('>');
    else if (ent == "quot") out.push_back('"');
    else if (ent == "apos") out.push_back('\'');
    else if (!ent.empty() && ent[0] == '#') {
      int base = 10;
      auto digits = ent.substr(1);
      if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
        base = 16;
        digits = digits.substr(1);
      }
      unsigned code = 0;
      std::from_chars(digits.data(), digits.data() + digits.size(), code, base);
      out.push_back(code < 128 ? static_cast<char>(code) : ' ');
    } else {
      out.append(s.substr(i, semi - i + 1));
    }
    i = semi;
  }
  return out;
}

class TagScanner {
 public:
  explicit TagScanner(std::string_view doc) : doc_(doc) {}

  std::optional<Tag> next() {
    while (true) {
      const auto lt = doc_.find('<', pos_);
      if (lt == std::string_view::npos) return std::nullopt;
      pos_ = lt;
      if (starts("<!--")) {
        skip_past("-->");
        continue;
      }
      if (starts("<![CDATA[")) {
        skip_past("]]>");
        continue;
      }
      if (starts("<?")) {
        skip_past("?>");
        continue;
      }
      if (starts("<!")) {
        skip_declaration();
        continue;
      }
      return parse_tag();
    }
  }

 private:
  bool starts(std::string_view s) const { return doc_.substr(pos_, s.size()) == s; }

  void skip_past(std::string_view end) {
    const auto at = doc_.find(end, pos_);
    if (at == std::string_view::npos) parse_error("unterminated markup");
    pos_ = at + end.size();
  }

  void skip_declaration() {
    int bracket = 0;
    for (; pos_ < doc_.size(); ++pos_) {
      const char ch = doc_[pos_];
      if (ch == '[') ++bracket;
      if (ch == ']') --bracket;
      if (ch == '>' && bracket <= 0) {
        ++pos_;
        return;
      }
    }
    parse_error("unterminated declaration");
  }

  static bool is_space(char ch) {
    return ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r';
  }

  Tag parse_tag() {
    Tag tag;
    ++pos_;  // '<'
    if (pos_ < doc_.size() && doc_[pos_] == '/') {
      tag.closing = true;
      ++pos_;
    }
    const auto name_start = pos_;
    while (pos_ < doc_.size() && !is_space(doc_[pos_]) && doc_[pos_] != '>' &&
           doc_[pos_] != '/') {
      ++pos_;
    }
    tag.name = std::string(doc_.substr(name_start, pos_ - name_start));
    if (auto colon = tag.name.find(':'); colon != std::string::npos) {
      tag.name = tag.name.substr(colon + 1);
    }
    while (true) {
      while (pos_ < doc_.size() && is_space(doc_[pos_])) ++pos_;
      if (pos_ >= doc_.size()) parse_error("unterminated tag <" + tag.name + ">");
      if (doc_[pos_] == '>') {
        ++pos_;
        return tag;
      }
      if (doc_[pos_] == '/') {
        tag.self_closing = true;
        ++pos_;
        continue;
      }
      const auto key_start = pos_;
      while (pos_ < doc_.size() && !is_space(doc_[pos_]) && doc_[pos_] != '=' &&
             doc_[pos_] != '>' && doc_[pos_] != '/') {
        ++pos_;
      }
      std::string key(doc_.substr(key_start, pos_ - key_start));
      while (pos_ < doc_.size() && is_space(doc_[pos_])) ++pos_;
      std::string value;
      if (pos_ < doc_.size() && doc_[pos_] == '=') {
        ++pos_;
        while (pos_ < doc_.size() && is_space(doc_[pos_])) ++pos_;
        if (pos_ >= doc_.size()) parse_error("attribute without value");
        const char quote = doc_[pos_];
        if (quote != '"' && quote != '\'') parse_error("unquoted attribute " + key);
        const auto end = doc_.find(quote, pos_ + 1);
        if (end == std::string_view::npos) parse_error("unterminated attribute " + key);
        value = decode_entities(doc_.substr(pos_ + 1, end - pos_ - 1));
        pos_ = end + 1;
      }
      tag.attrs[std::move(key)] = std::move(value);
    }
  }

  std::string_view doc_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Number scanning shared by path data, transforms and point lists.

class NumberStream {
 public:
  explicit NumberStream(std::string_view s) : s_(s) {}

  void skip_separators() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == ',' || s_[i_] == '\t' ||
                              s_[i_] == '\n' || s_[i_] == '\r')) {
      ++i_;
    }
  }
  bool at_end() {
    skip_separators();
    return i_ >= s_.size();
  }
  char peek() {
    skip_separators();
    return i_ < s_.size() ? s_[i_] : '\0';
  }
  char take() { return s_[i_++]; }
  bool at_number() {
    const char ch = peek();
    return (ch >= '0' && ch <= '9') || ch == '-' || ch == '+' || ch == '.';
  }

  double number() {
    skip_separators();
    std::size_t j = i_;
    if (j < s_.size() && (s_[j] == '+' || s_[j] == '-')) ++j;
    bool dot = false;
    bool digits = false;
    while (j < s_.size()) {
      const char ch = s_[j];
      if (ch >= '0' && ch <= '9') {
        digits = true;
        ++j;
      } else if (ch == '.' && !dot) {
        dot = true;
        ++j;
      } else {
        break;
      }
    }
    if (digits && j < s_.size() && (s_[j] == 'e' || s_[j] == 'E')) {
      std::size_t k = j + 1;
      if (k < s_.size() && (s_[k] == '+' || s_[k] == '-')) ++k;
      if (k < s_.size() && s_[k] >= '0' && s_[k] <= '9') {
        while (k < s_.size() && s_[k] >= '0' && s_[k] <= '9') ++k;
        j = k;
      }
    }
    if (!digits) parse_error("expected number near offset " + std::to_string(i_));
    std::size_t begin = i_;
    if (s_[begin] == '+') ++begin;
    double value = 0.0;
    const auto res = std::from_chars(s_.data() + begin, s_.data() + j, value);
    if (res.ec != std::errc{}) parse_error("bad number");
    i_ = j;
    return value;
  }

  // Arc flags may be written without separators ("011").
  bool flag() {
    skip_separators();
    if (i_ < s_.size() && (s_[i_] == '0' || s_[i_] == '1')) return s_[i_++] == '1';
    parse_error("expected arc flag");
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0;
};

Affine parse_transform(std::string_view text) {
  Affine result;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == ',' || text[i] == '\n' ||
                               text[i] == '\t' || text[i] == '\r')) {
      ++i;
    }
    if (i >= text.size()) break;
    const auto open = text.find('(', i);
    const auto close = text.find(')', i);
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
      parse_error("malformed transform");
    }
    std::string name(text.substr(i, open - i));
    name.erase(std::remove(name.begin(), name.end(), ' '), name.end());
    NumberStream ns(text.substr(open + 1, close - open - 1));
    std::vector<double> args;
    while (!ns.at_end()) args.push_back(ns.number());
    Affine m;
    auto need = [&](std::size_t n) {
      if (args.size() < n) parse_error("transform " + name + " needs arguments");
    };
    if (name == "matrix") {
      need(6);
      m = {args[0], args[1], args[2], args[3], args[4], args[5]};
    } else if (name == "translate") {
      need(1);
      m.e = args[0];
      m.f = args.size() > 1 ? args[1] : 0.0;
    } else if (name == "scale") {
      need(1);
      m.a = args[0];
      m.d = args.size() > 1 ? args[1] : args[0];
    } else if (name == "rotate") {
      need(1);
      const double r = args[0] * kPi / 180.0;
      Affine rot{std::cos(r), std::sin(r), -std::sin(r), std::cos(r), 0, 0};
      if (args.size() >= 3) {
        const Affine to{1, 0, 0, 1, args[1], args[2]};
        const Affine back{1, 0, 0, 1, -args[1], -args[2]};
        m = to * rot * back;
      } else {
        m = rot;
      }
    } else if (name == "skewX") {
      need(1);
      m.c = std::tan(args[0] * kPi / 180.0);
    } else if (name == "skewY") {
      need(1);
      m.b = std::tan(args[0] * kPi / 180.0);
    } else {
      parse_error("unsupported transform " + name);
    }
    result = result * m;
    i = close + 1;
  }
  return result;
}

// Length in mm; nullopt when unitless, px or relative.
struct Length {
  double value = 0.0;
  std::optional<double> mm;
};

std::optional<Length> parse_length(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::size_t end = 0;
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{}) return std::nullopt;
  end = static_cast<std::size_t>(res.ptr - text.data());
  std::string unit = text.substr(end);
  unit.erase(std::remove(unit.begin(), unit.end(), ' '), unit.end());
  Length len{v, std::nullopt};
  if (unit == "mm") len.mm = v;
  else if (unit == "cm") len.mm = v * 10.0;
  else if (unit == "in") len.mm = v * 25.4;
  else if (unit == "pt") len.mm = v * 25.4 / 72.0;
  else if (unit == "pc") len.mm = v * 25.4 / 6.0;
  else if (unit == "px" || unit.empty()) len.mm = v / kDefaultPxPerMm;
  else return std::nullopt;
  return len;
}

// ---------------------------------------------------------------------------
// Path flattening. Control points are mapped to mm first; flattening then
// happens in output space so the tolerance is in mm.

struct Subpath {
  std::vector<Point2> points;
  bool closed = false;
};

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

void flatten_cubic(Point2 p0, Point2 p1, Point2 p2, Point2 p3, double tol, int depth,
                   std::vector<Point2>& out) {
  // The curve lies in the hull of its control points.
  const double dev = std::max(point_segment_distance(p1, p0, p3),
                              point_segment_distance(p2, p0, p3));
  if (dev <= tol || depth >= 24) {
    out.push_back(p3);
    return;
  }
  const Point2 p01 = (p0 + p1) * 0.5;
  const Point2 p12 = (p1 + p2) * 0.5;
  const Point2 p23 = (p2 + p3) * 0.5;
  const Point2 p012 = (p01 + p12) * 0.5;
  const Point2 p123 = (p12 + p23) * 0.5;
  const Point2 mid = (p012 + p123) * 0.5;
  flatten_cubic(p0, p01, p012, mid, tol, depth + 1, out);
  flatten_cubic(mid, p123, p23, p3, tol, depth + 1, out);
}

void flatten_quad(Point2 p0, Point2 p1, Point2 p2, double tol, int depth,
                  std::vector<Point2>& out) {
  if (point_segment_distance(p1, p0, p2) <= tol || depth >= 24) {
    out.push_back(p2);
    return;
  }
  const Point2 p01 = (p0 + p1) * 0.5;
  const Point2 p12 = (p1 + p2) * 0.5;
  const Point2 mid = (p01 + p12) * 0.5;
  flatten_quad(p0, p01, mid, tol, depth + 1, out);
  flatten_quad(mid, p12, p2, tol, depth + 1, out);
}

// Endpoint-to-centre conversion follows the SVG implementation notes.
void flatten_arc(Point2 from, double rx, double ry, double phi_deg, bool large,
                 bool sweep, Point2 to, const Affine& m, double tol,
                 std::vector<Point2>& out) {
  if (from == to) return;
  rx = std::abs(rx);
  ry = std::abs(ry);
  if (rx == 0.0 || ry == 0.0) {
    out.push_back(m.apply(to));
    return;
  }
  const double phi = phi_deg * kPi / 180.0;
  const double cp = std::cos(phi);
  const double sp = std::sin(phi);
  const double dx = (from.x - to.x) / 2.0;
  const double dy = (from.y - to.y) / 2.0;
  const double x1 = cp * dx + sp * dy;
  const double y1 = -sp * dx + cp * dy;
  const double lambda = (x1 * x1) / (rx * rx) + (y1 * y1) / (ry * ry);
  if (lambda > 1.0) {
    rx *= std::sqrt(lambda);
    ry *= std::sqrt(lambda);
  }
  const double num = rx * rx * ry * ry - rx * rx * y1 * y1 - ry * ry * x1 * x1;
  const double den = rx * rx * y1 * y1 + ry * ry * x1 * x1;
  double coef = std::sqrt(std::max(0.0, num / den));
  if (large == sweep) coef = -coef;
  const double cxp = coef * rx * y1 / ry;
  const double cyp = -coef * ry * x1 / rx;
  const double cx = cp * cxp - sp * cyp + (from.x + to.x) / 2.0;
  const double cy = sp * cxp + cp * cyp + (from.y + to.y) / 2.0;
  auto angle = [](double ux, double uy, double vx, double vy) {
    return std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
  };
  const double theta1 = angle(1, 0, (x1 - cxp) / rx, (y1 - cyp) / ry);
  double dtheta = angle((x1 - cxp) / rx, (y1 - cyp) / ry, (-x1 - cxp) / rx, (-y1 - cyp) / ry);
  if (!sweep && dtheta > 0) dtheta -= 2 * kPi;
  if (sweep && dtheta < 0) dtheta += 2 * kPi;

  // Chord sagitta r(1 - cos(h/2)) bounded by tol in user units; affine maps
  // stretch distances by at most max_scale().
  const double r = std::max(rx, ry);
  const double tol_user = tol / m.max_scale();
  double step = kPi / 2.0;
  if (tol_user < r) step = std::min(step, 2.0 * std::acos(1.0 - tol_user / r));
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(dtheta) / step)));
  for (int k = 1; k <= n; ++k) {
    if (k == n) {
      out.push_back(m.apply(to));
      break;
    }
    const double t = theta1 + dtheta * k / n;
    const double ex = rx * std::cos(t);
    const double ey = ry * std::sin(t);
    out.push_back(m.apply({cp * ex - sp * ey + cx, sp * ex + cp * ey + cy}));
  }
}

std::vector<Subpath> parse_path_data(std::string_view d, const Affine& m, double tol) {
  std::vector<Subpath> result;
  NumberStream ns(d);
  Point2 cur{0, 0};
  Point2 start{0, 0};
  Point2 last_ctrl{0, 0};
  char prev_cmd = 0;
  char cmd = 0;
  Subpath current;

  auto flush = [&]() {
    if (current.points.size() >= 2) result.push_back(std::move(current));
    current = Subpath{};
  };
  auto begin_at = [&](Point2 p) {
    flush();
    current.points.push_back(m.apply(p));
  };

  while (!ns.at_end()) {
    if (!ns.at_number()) {
      cmd = ns.take();
    } else if (cmd == 0) {
      parse_error("path data must start with a command");
    } else if (cmd == 'M') {
      cmd = 'L';
    } else if (cmd == 'm') {
      cmd = 'l';
    } else if (cmd == 'Z' || cmd == 'z') {
      parse_error("numbers after closepath");
    }
    const bool rel = std::islower(static_cast<unsigned char>(cmd)) != 0;
    const Point2 base = rel ? cur : Point2{0, 0};
    switch (std::toupper(static_cast<unsigned char>(cmd))) {
      case 'M': {
        const double x = ns.number();
        const double y = ns.number();
        cur = base + Point2{x, y};
        start = cur;
        begin_at(cur);
        break;
      }
      case 'L': {
        const double x = ns.number();
        const double y = ns.number();
        cur = base + Point2{x, y};
        current.points.push_back(m.apply(cur));
        break;
      }
      case 'H': {
        const double x = ns.number();
        cur = {rel ? cur.x + x : x, cur.y};
        current.points.push_back(m.apply(cur));
        break;
      }
      case 'V': {
        const double y = ns.number();
        cur = {cur.x, rel ? cur.y + y : y};
        current.points.push_back(m.apply(cur));
        break;
      }
      case 'C':
      case 'S': {
        Point2 c1;
        if (std::toupper(static_cast<unsigned char>(cmd)) == 'C') {
          const double x1 = ns.number();
          const double y1 = ns.number();
          c1 = base + Point2{x1, y1};
        } else {
          const char p = static_cast<char>(std::toupper(static_cast<unsigned char>(prev_cmd)));
          c1 = (p == 'C' || p == 'S') ? cur * 2.0 - last_ctrl : cur;
        }
        const double x2 = ns.number();
        const double y2 = ns.number();
        const double x = ns.number();
        const double y = ns.number();
        const Point2 c2 = base + Point2{x2, y2};
        const Point2 end = base + Point2{x, y};
        if (current.points.empty()) current.points.push_back(m.apply(cur));
        flatten_cubic(m.apply(cur), m.apply(c1), m.apply(c2), m.apply(end), tol, 0,
                      current.points);
        last_ctrl = c2;
        cur = end;
        break;
      }
      case 'Q':
      case 'T': {
        Point2 c1;
        if (std::toupper(static_cast<unsigned char>(cmd)) == 'Q') {
          const double x1 = ns.number();
          const double y1 = ns.number();
          c1 = base + Point2{x1, y1};
        } else {
          const char p = static_cast<char>(std::toupper(static_cast<unsigned char>(prev_cmd)));
          c1 = (p == 'Q' || p == 'T') ? cur * 2.0 - last_ctrl : cur;
        }
        const double x = ns.number();
        const double y = ns.number();
        const Point2 end = base + Point2{x, y};
        if (current.points.empty()) current.points.push_back(m.apply(cur));
        flatten_quad(m.apply(cur), m.apply(c1), m.apply(end), tol, 0, current.points);
        last_ctrl = c1;
        cur = end;
        break;
      }
      case 'A': {
        const double rx = ns.number();
        const double ry = ns.number();
        const double rot = ns.number();
        const bool large = ns.flag();
        const bool sweep = ns.flag();
        const double x = ns.number();
        const double y = ns.number();
        const Point2 end = base + Point2{x, y};
        if (current.points.empty()) current.points.push_back(m.apply(cur));
        flatten_arc(cur, rx, ry, rot, large, sweep, end, m, tol, current.points);
        cur = end;
        break;
      }
      case 'Z': {
        current.closed = true;
        cur = start;
        flush();
        // A following command without M continues from the subpath start.
        current.points.push_back(m.apply(start));
        break;
      }
      default:
        parse_error(std::string("unsupported path command '") + cmd + "'");
    }
    prev_cmd = cmd;
  }
  flush();
  return result;
}

std::vector<double> parse_numbers(const std::string& text) {
  NumberStream ns(text);
  std::vector<double> out;
  while (!ns.at_end()) out.push_back(ns.number());
  return out;
}

double num_attr(const Tag& tag, const std::string& key, double fallback = 0.0) {
  const std::string v = tag.attr(key);
  if (v.empty()) return fallback;
  const auto len = parse_length(v);
  if (!len) parse_error("bad numeric attribute " + key + "=\"" + v + "\"");
  return len->value;
}

// Basic shapes are rewritten as path data.
std::optional<std::string> shape_to_path(const Tag& tag) {
  std::ostringstream d;
  d.precision(17);
  if (tag.name == "path") return tag.attr("d");
  if (tag.name == "line") {
    d << "M" << num_attr(tag, "x1") << " " << num_attr(tag, "y1") << " L"
      << num_attr(tag, "x2") << " " << num_attr(tag, "y2");
    return d.str();
  }
  if (tag.name == "polyline" || tag.name == "polygon") {
    const auto v = parse_numbers(tag.attr("points"));
    if (v.size() < 4) return std::nullopt;
    d << "M" << v[0] << " " << v[1];
    for (std::size_t i = 2; i + 1 < v.size(); i += 2) d << " L" << v[i] << " " << v[i + 1];
    if (tag.name == "polygon") d << " Z";
    return d.str();
  }
  if (tag.name == "rect") {
    const double x = num_attr(tag, "x");
    const double y = num_attr(tag, "y");
    const double w = num_attr(tag, "width");
    const double h = num_attr(tag, "height");
    if (w <= 0 || h <= 0) return std::nullopt;
    double rx = num_attr(tag, "rx", -1);
    double ry = num_attr(tag, "ry", -1);
    if (rx < 0) rx = ry;
    if (ry < 0) ry = rx;
    rx = std::clamp(rx, 0.0, w / 2);
    ry = std::clamp(ry, 0.0, h / 2);
    if (rx <= 0 || ry <= 0) {
      d << "M" << x << " " << y << " H" << x + w << " V" << y + h << " H" << x << " Z";
    } else {
      d << "M" << x + rx << " " << y << " H" << x + w - rx << " A" << rx << " " << ry
        << " 0 0 1 " << x + w << " " << y + ry << " V" << y + h - ry << " A" << rx << " "
        << ry << " 0 0 1 " << x + w - rx << " " << y + h << " H" << x + rx << " A" << rx
        << " " << ry << " 0 0 1 " << x << " " << y + h - ry << " V" << y + ry << " A" << rx
        << " " << ry << " 0 0 1 " << x + rx << " " << y << " Z";
    }
    return d.str();
  }
  if (tag.name == "circle" || tag.name == "ellipse") {
    const double cx = num_attr(tag, "cx");
    const double cy = num_attr(tag, "cy");
    double rx = tag.name == "circle" ? num_attr(tag, "r") : num_attr(tag, "rx");
    double ry = tag.name == "circle" ? rx : num_attr(tag, "ry");
    if (rx <= 0 || ry <= 0) return std::nullopt;
    d << "M" << cx + rx << " " << cy << " A" << rx << " " << ry << " 0 1 0 " << cx - rx
      << " " << cy << " A" << rx << " " << ry << " 0 1 0 " << cx + rx << " " << cy << " Z";
    return d.str();
  }
  return std::nullopt;
}

Polyline to_polyline(const Subpath& sp) {
  std::vector<Point2> pts;
  pts.reserve(sp.points.size());
  for (const auto& p : sp.points) {
    if (pts.empty() || distance(pts.back(), p) > kMinPointSeparation) pts.push_back(p);
  }
  bool closed = sp.closed;
  if (pts.size() >= 3 && distance(pts.front(), pts.back()) <= kMinPointSeparation) {
    pts.pop_back();
    closed = true;
  }
  return Polyline(std::move(pts), closed);
}

bool is_hidden_container(const std::string& name) {
  return name == "defs" || name == "clipPath" || name == "mask" || name == "symbol" ||
         name == "pattern" || name == "marker";
}

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

std::string sanitize_comment(std::string s) {
  std::size_t at = 0;
  while ((at = s.find("--", at)) != std::string::npos) s.replace(at, 2, "- -");
  return s;
}

}  // namespace

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // drop negative zero
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

std::vector<SvgShape> import_svg_shapes(std::string_view document,
                                        const SvgImportOptions& options) {
  TagScanner scanner(document);
  std::vector<SvgShape> shapes;

  struct Frame {
    std::string name;
    Affine ctm;
    std::string layer;
  };
  std::vector<Frame> stack;
  Affine root;
  bool seen_root = false;
  int hidden_depth = 0;

  while (auto tag = scanner.next()) {
    if (tag->closing) {
      if (!stack.empty() && stack.back().name == tag->name) {
        if (is_hidden_container(tag->name) && hidden_depth > 0) --hidden_depth;
        stack.pop_back();
      }
      continue;
    }
    if (tag->name == "svg" && !seen_root) {
      seen_root = true;
      double mm_per_user = 1.0 / kDefaultPxPerMm;
      if (options.px_per_mm) {
        if (!(*options.px_per_mm > 0.0)) {
          throw Error(ErrorCode::invalid_argument, "px_per_mm must be positive");
        }
        mm_per_user = 1.0 / *options.px_per_mm;
      } else {
        const auto vb = parse_numbers(tag->attr("viewBox"));
        const auto width = parse_length(tag->attr("width"));
        if (vb.size() == 4 && vb[2] > 0.0 && width && width->mm) {
          mm_per_user = *width->mm / vb[2];
        }
      }
      root = Affine{mm_per_user, 0, 0, options.flip_y ? -mm_per_user : mm_per_user,
                    options.offset.x, options.offset.y};
      if (!tag->self_closing) stack.push_back({tag->name, root, {}});
      continue;
    }
    const Affine parent = stack.empty() ? root : stack.back().ctm;
    const std::string parent_layer = stack.empty() ? std::string{} : stack.back().layer;
    Affine ctm = parent;
    if (tag->has("transform")) ctm = parent * parse_transform(tag->attr("transform"));

    if (is_hidden_container(tag->name)) {
      if (!tag->self_closing) {
        ++hidden_depth;
        stack.push_back({tag->name, ctm, parent_layer});
      }
      continue;
    }
    if (tag->name == "g") {
      if (!tag->self_closing) {
        const std::string id = tag->attr("id");
        stack.push_back({tag->name, ctm, id.empty() ? parent_layer : id});
      }
      continue;
    }
    if (hidden_depth == 0) {
      if (const auto d = shape_to_path(*tag)) {
        for (const auto& sp : parse_path_data(*d, ctm, options.flatten_tolerance)) {
          shapes.push_back({to_polyline(sp), tag->attr("id"), parent_layer});
        }
      }
    }
    if (!tag->self_closing) stack.push_back({tag->name, ctm, parent_layer});
  }
  if (!seen_root) parse_error("no <svg> root element");
  return shapes;
}

Profile import_profile_svg(std::string_view document, const SvgImportOptions& options) {
  const auto shapes = import_svg_shapes(document, options);
  std::vector<const SvgShape*> open;
  for (const auto& s : shapes) {
    if (!s.polyline.closed()) open.push_back(&s);
  }
  if (open.empty()) {
    throw Error(ErrorCode::no_open_path, "svg contains no open path to use as a profile");
  }
  if (options.path_index >= open.size()) {
    throw Error(ErrorCode::no_open_path,
                "svg has " + std::to_string(open.size()) + " open path(s); index " +
                    std::to_string(options.path_index) + " requested");
  }
  const MaterialSide material = options.material.value_or(default_material(options.side));
  Profile profile(open[options.path_index]->polyline, options.side, material);
  if (options.required_span > 0.0 && profile.span() < options.required_span) {
    throw Error(ErrorCode::path_too_short,
                "profile spans " + format_number(profile.span()) +
                    " mm but the travel zone needs " + format_number(options.required_span) +
                    " mm");
  }
  return profile;
}

std::string export_layers_svg(std::span<const SvgLayer> layers, const DrawingMetadata& metadata) {
  std::vector<Polyline> all;
  for (const auto& layer : layers) all.insert(all.end(), layer.shapes.begin(), layer.shapes.end());
  if (all.empty()) throw Error(ErrorCode::invalid_argument, "nothing to export");

  // SVG user units are mm with y pointing down.
  const BBox b = bounds(all);
  const double m = metadata.margin_mm;
  const double vx = b.min.x - m;
  const double vy = -b.max.y - m;
  const double vw = b.width() + 2 * m;
  const double vh = b.height() + 2 * m;

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  for (const auto& c : metadata.comments) out += "<!-- " + sanitize_comment(c) + " -->\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         format_number(vw) + "mm\" height=\"" + format_number(vh) + "mm\" viewBox=\"" +
         format_number(vx) + " " + format_number(vy) + " " + format_number(vw) + " " +
         format_number(vh) + "\">\n";
  if (!metadata.title.empty()) out += "<title>" + escape_xml(metadata.title) + "</title>\n";
  for (const auto& layer : layers) {
    out += "<g id=\"" + escape_xml(layer.name) + "\" fill=\"none\" stroke=\"" + layer.stroke +
           "\" stroke-width=\"0.1\">\n";
    for (const auto& shape : layer.shapes) {
      out += "<path d=\"";
      const auto& pts = shape.points();
      for (std::size_t i = 0; i < pts.size(); ++i) {
        out += i == 0 ? "M" : " L";
        out += format_number(pts[i].x);
        out += ' ';
        out += format_number(-pts[i].y);
      }
      if (shape.closed()) out += " Z";
      out += "\"/>\n";
    }
    for (const auto& label : layer.labels) {
      out += "<text x=\"" + format_number(label.position.x) + "\" y=\"" +
             format_number(-label.position.y) + "\" font-size=\"" +
             format_number(label.size_mm) + "\" stroke=\"none\" fill=\"" + layer.stroke +
             "\">" + escape_xml(label.text) + "</text>\n";
    }
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string export_polyline_svg(std::span<const Polyline> shapes, const DrawingMetadata& metadata) {
  if (shapes.empty()) throw Error(ErrorCode::invalid_argument, "nothing to export");
  const SvgLayer layer{"cut", {shapes.begin(), shapes.end()}, {}, "#000000"};
  return export_layers_svg(std::span<const SvgLayer>(&layer, 1), metadata);
}

}  // namespace detent
