#ifndef PATHFORGE_RENDER_HPP
#define PATHFORGE_RENDER_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "pathforge/error.hpp"
#include "pathforge/geometry.hpp"
#include "pathforge/planner.hpp"

namespace pathforge {

struct RenderStyle {
  int width = 600;
  int height = 600;
  int margin = 12;
  int gutter = 24;  // between panels of a pair
  std::string background = "#ffffff";
  std::string grid_color = "#e3e3e3";
  std::string obstacle_color = "#3a3a3a";
  std::string path_color = "#d62728";
  std::string start_color = "#1f77b4";
  std::string goal_color = "#2ca02c";
  std::string label_color = "#ffffff";
  double grid_stroke = 1.0;
  double path_stroke = 3.0;
  double marker_radius = 10.0;
  double label_size = 14.0;
  bool show_grid = true;
};

inline void check_style(const RenderStyle& s) {
  if (s.width <= 0 || s.height <= 0 || s.margin < 0 || s.gutter < 0 || 2 * s.margin >= std::min(s.width, s.height))
    throw Error(errc::kInvalidInput, "render canvas dimensions must be positive");
  if (!(s.path_stroke > 0.0) || !(s.grid_stroke > 0.0) || !(s.marker_radius > 0.0) || !(s.label_size > 0.0))
    throw Error(errc::kInvalidInput, "render stroke widths and sizes must be positive");
}

/// One drawing primitive in canvas pixels, y pointing down.
struct Shape {
  enum class Kind { rect, line, polygon, polyline, circle, text };
  Kind kind = Kind::line;
  std::vector<Point> pts;  // rect: corner + size; circle/text: centre
  std::string fill;
  std::string stroke;
  double stroke_width = 0.0;
  double radius = 0.0;
  std::string text;
};

struct DisplayList {
  int width = 0;
  int height = 0;
  std::vector<Shape> shapes;
};

/// Workspace to pixel mapping for one panel.
struct Viewport {
  double x0 = 0.0;  // panel left edge in canvas pixels
  double scale_x = 1.0;
  double scale_y = 1.0;
  double margin = 0.0;
  double panel_height = 0.0;

  Point map(Point p) const noexcept {
    return {x0 + margin + p.x * scale_x, panel_height - margin - p.y * scale_y};
  }
};

namespace detail {

inline void check_path_in(const Environment& env, const Path& path) {
  if (path.env_id != env.id)
    throw Error(errc::kPathEnvMismatch, "path " + path.id + " belongs to '" + path.env_id + "', not '" + env.id + "'");
  for (const Point& p : path.points)
    if (!env.in_bounds(p))
      throw Error(errc::kPathEnvMismatch, "path " + path.id + " leaves the workspace of " + env.id);
}

inline void draw_panel(DisplayList& dl, const Environment& env, const std::vector<Point>& path, double x0,
                       const RenderStyle& s, bool markers = true) {
  Viewport vp;
  vp.x0 = x0;
  vp.margin = s.margin;
  vp.panel_height = s.height;
  vp.scale_x = (s.width - 2.0 * s.margin) / env.width;
  vp.scale_y = (s.height - 2.0 * s.margin) / env.height;

  if (s.show_grid) {
    for (int i = 0; i <= static_cast<int>(std::floor(env.width)); ++i)
      dl.shapes.push_back({Shape::Kind::line, {vp.map({double(i), 0.0}), vp.map({double(i), env.height})}, "",
                           s.grid_color, s.grid_stroke, 0.0, ""});
    for (int j = 0; j <= static_cast<int>(std::floor(env.height)); ++j)
      dl.shapes.push_back({Shape::Kind::line, {vp.map({0.0, double(j)}), vp.map({env.width, double(j)})}, "",
                           s.grid_color, s.grid_stroke, 0.0, ""});
  }
  for (const auto& o : env.obstacles) {
    Shape poly{Shape::Kind::polygon, {}, s.obstacle_color, "", 0.0, 0.0, ""};
    for (const Point& v : o.vertices) poly.pts.push_back(vp.map(v));
    dl.shapes.push_back(std::move(poly));
  }
  if (path.size() == 1) {
    dl.shapes.push_back({Shape::Kind::circle, {vp.map(path.front())}, s.path_color, "", 0.0, 1.5 * s.path_stroke, ""});
  } else if (!path.empty()) {
    Shape line{Shape::Kind::polyline, {}, "", s.path_color, s.path_stroke, 0.0, ""};
    for (const Point& p : path) line.pts.push_back(vp.map(p));
    dl.shapes.push_back(std::move(line));
  }
  if (!markers) return;
  const Point a = vp.map(env.start);
  const Point b = vp.map(env.goal);
  dl.shapes.push_back({Shape::Kind::circle, {a}, s.start_color, "", 0.0, s.marker_radius, ""});
  dl.shapes.push_back({Shape::Kind::text, {a}, s.label_color, "", 0.0, s.label_size, "1"});
  dl.shapes.push_back({Shape::Kind::circle, {b}, s.goal_color, "", 0.0, s.marker_radius, ""});
  dl.shapes.push_back({Shape::Kind::text, {b}, s.label_color, "", 0.0, s.label_size, "2"});
}

inline void begin(DisplayList& dl, int width, int height, const RenderStyle& s) {
  dl.width = width;
  dl.height = height;
  dl.shapes.push_back({Shape::Kind::rect, {{0.0, 0.0}, {double(width), double(height)}}, s.background, "", 0.0,
                       0.0, ""});
}

}  // namespace detail

inline DisplayList scene_display_list(const Environment& env, const Path& path, const RenderStyle& style = {}) {
  check_style(style);
  detail::check_path_in(env, path);
  DisplayList dl;
  detail::begin(dl, style.width, style.height, style);
  detail::draw_panel(dl, env, path.points, 0.0, style);
  return dl;
}

/// Draws arbitrary geometry (for example a probe segment) in place of a path,
/// without start and goal markers.
inline DisplayList geometry_display_list(const Environment& env, const std::vector<Point>& pts,
                                         const RenderStyle& style = {}) {
  check_style(style);
  DisplayList dl;
  detail::begin(dl, style.width, style.height, style);
  detail::draw_panel(dl, env, pts, 0.0, style, false);
  return dl;
}

/// Two equal panels, path_1 on the left.
inline DisplayList pair_display_list(const Environment& env, const Path& path_1, const Path& path_2,
                                     const RenderStyle& style = {}) {
  check_style(style);
  detail::check_path_in(env, path_1);
  detail::check_path_in(env, path_2);
  DisplayList dl;
  detail::begin(dl, 2 * style.width + style.gutter, style.height, style);
  detail::draw_panel(dl, env, path_1.points, 0.0, style);
  detail::draw_panel(dl, env, path_2.points, double(style.width + style.gutter), style);
  return dl;
}

// ---------------------------------------------------------------------------
// SVG output

namespace detail {

inline std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

inline std::string svg_points(const std::vector<Point>& pts) {
  std::string out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ' ';
    out += fmt2(pts[i].x) + ',' + fmt2(pts[i].y);
  }
  return out;
}

}  // namespace detail

inline std::string to_svg(const DisplayList& dl) {
  using detail::fmt2;
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(dl.width) + "\" height=\"" +
         std::to_string(dl.height) + "\" viewBox=\"0 0 " + std::to_string(dl.width) + " " +
         std::to_string(dl.height) + "\">\n";
  for (const auto& sh : dl.shapes) {
    switch (sh.kind) {
      case Shape::Kind::rect:
        out += "<rect x=\"" + fmt2(sh.pts[0].x) + "\" y=\"" + fmt2(sh.pts[0].y) + "\" width=\"" + fmt2(sh.pts[1].x) +
               "\" height=\"" + fmt2(sh.pts[1].y) + "\" fill=\"" + sh.fill + "\"/>\n";
        break;
      case Shape::Kind::line:
        out += "<line x1=\"" + fmt2(sh.pts[0].x) + "\" y1=\"" + fmt2(sh.pts[0].y) + "\" x2=\"" + fmt2(sh.pts[1].x) +
               "\" y2=\"" + fmt2(sh.pts[1].y) + "\" stroke=\"" + sh.stroke + "\" stroke-width=\"" +
               fmt2(sh.stroke_width) + "\"/>\n";
        break;
      case Shape::Kind::polygon:
        out += "<polygon points=\"" + detail::svg_points(sh.pts) + "\" fill=\"" + sh.fill + "\"/>\n";
        break;
      case Shape::Kind::polyline:
        out += "<polyline points=\"" + detail::svg_points(sh.pts) + "\" fill=\"none\" stroke=\"" + sh.stroke +
               "\" stroke-width=\"" + fmt2(sh.stroke_width) + "\" stroke-linejoin=\"round\" stroke-linecap=\"round\"/>\n";
        break;
      case Shape::Kind::circle:
        out += "<circle cx=\"" + fmt2(sh.pts[0].x) + "\" cy=\"" + fmt2(sh.pts[0].y) + "\" r=\"" + fmt2(sh.radius) +
               "\" fill=\"" + sh.fill + "\"/>\n";
        break;
      case Shape::Kind::text:
        out += "<text x=\"" + fmt2(sh.pts[0].x) + "\" y=\"" + fmt2(sh.pts[0].y) + "\" font-family=\"sans-serif\" font-size=\"" +
               fmt2(sh.radius) + "\" font-weight=\"bold\" fill=\"" + sh.fill +
               "\" text-anchor=\"middle\" dominant-baseline=\"central\">" + sh.text + "</text>\n";
        break;
    }
  }
  out += "</svg>\n";
  return out;
}

inline std::string render_scene(const Environment& env, const Path& path, const RenderStyle& style = {}) {
  return to_svg(scene_display_list(env, path, style));
}

inline std::string render_pair(const Environment& env, const Path& path_1, const Path& path_2,
                               const RenderStyle& style = {}) {
  return to_svg(pair_display_list(env, path_1, path_2, style));
}

// ---------------------------------------------------------------------------
// Raster output

struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

  std::array<std::uint8_t, 3> at(int x, int y) const {
    const std::size_t k = (static_cast<std::size_t>(y) * width + x) * 3;
    return {rgb[k], rgb[k + 1], rgb[k + 2]};
  }
};

namespace detail {

using Rgb = std::array<std::uint8_t, 3>;

inline Rgb parse_color(const std::string& hex) {
  if (hex.size() != 7 || hex[0] != '#') throw Error(errc::kInvalidInput, "colors must be #rrggbb, got '" + hex + "'");
  auto nib = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw Error(errc::kInvalidInput, "colors must be #rrggbb, got '" + hex + "'");
  };
  Rgb out{};
  for (int i = 0; i < 3; ++i) out[i] = static_cast<std::uint8_t>(nib(hex[1 + 2 * i]) * 16 + nib(hex[2 + 2 * i]));
  return out;
}

// 5x7 bitmaps, one row per byte, most significant of the low five bits leftmost.
inline const std::array<std::uint8_t, 7>* glyph(char c) {
  static const std::array<std::array<std::uint8_t, 7>, 10> digits = {{
      {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E},
      {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E},
      {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F},
      {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E},
      {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02},
      {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E},
      {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E},
      {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},
      {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E},
      {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C},
  }};
  if (c < '0' || c > '9') return nullptr;
  return &digits[static_cast<std::size_t>(c - '0')];
}

class Canvas {
 public:
  Canvas(int w, int h) : img_{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h * 3, 255)} {}

  void set(int x, int y, const Rgb& c) {
    if (x < 0 || y < 0 || x >= img_.width || y >= img_.height) return;
    const std::size_t k = (static_cast<std::size_t>(y) * img_.width + x) * 3;
    img_.rgb[k] = c[0];
    img_.rgb[k + 1] = c[1];
    img_.rgb[k + 2] = c[2];
  }

  void fill_rect(double x0, double y0, double x1, double y1, const Rgb& c) {
    for (int y = clampy(std::ceil(y0 - 0.5)); y < clampy(std::ceil(y1 - 0.5)); ++y)
      for (int x = clampx(std::ceil(x0 - 0.5)); x < clampx(std::ceil(x1 - 0.5)); ++x) set(x, y, c);
  }

  // Even-odd scanline fill sampled at pixel centres.
  void fill_polygon(const std::vector<Point>& v, const Rgb& c) {
    if (v.size() < 3) return;
    double ymin = v[0].y, ymax = v[0].y;
    for (const Point& p : v) {
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    std::vector<double> xs;
    for (int y = clampy(std::floor(ymin)); y <= clampy(std::ceil(ymax)) && y < img_.height; ++y) {
      const double yc = y + 0.5;
      xs.clear();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const Point a = v[i], b = v[(i + 1) % v.size()];
        if ((a.y <= yc) != (b.y <= yc)) xs.push_back(a.x + (yc - a.y) / (b.y - a.y) * (b.x - a.x));
      }
      std::sort(xs.begin(), xs.end());
      for (std::size_t k = 0; k + 1 < xs.size(); k += 2)
        for (int x = clampx(std::ceil(xs[k] - 0.5)); x < clampx(std::ceil(xs[k + 1] - 0.5)); ++x) set(x, y, c);
    }
  }

  void stroke_segment(Point a, Point b, double width, const Rgb& c) {
    const double r = width / 2.0;
    for (int y = clampy(std::floor(std::min(a.y, b.y) - r)); y <= clampy(std::ceil(std::max(a.y, b.y) + r)); ++y)
      for (int x = clampx(std::floor(std::min(a.x, b.x) - r)); x <= clampx(std::ceil(std::max(a.x, b.x) + r)); ++x)
        if (dist_point_segment({x + 0.5, y + 0.5}, a, b) <= r) set(x, y, c);
  }

  void fill_circle(Point o, double r, const Rgb& c) {
    for (int y = clampy(std::floor(o.y - r)); y <= clampy(std::ceil(o.y + r)); ++y)
      for (int x = clampx(std::floor(o.x - r)); x <= clampx(std::ceil(o.x + r)); ++x)
        if (distance({x + 0.5, y + 0.5}, o) <= r) set(x, y, c);
  }

  void draw_text(Point centre, double size, const std::string& text, const Rgb& c) {
    const double cell = size / 7.0;
    const double advance = 6.0 * cell;
    double left = centre.x - (advance * static_cast<double>(text.size()) - cell) / 2.0;
    const double top = centre.y - 3.5 * cell;
    for (char ch : text) {
      if (const auto* g = glyph(ch)) {
        for (int row = 0; row < 7; ++row)
          for (int col = 0; col < 5; ++col)
            if (((*g)[row] >> (4 - col)) & 1)
              fill_rect(left + col * cell, top + row * cell, left + (col + 1) * cell, top + (row + 1) * cell, c);
      }
      left += advance;
    }
  }

  Image take() { return std::move(img_); }

 private:
  int clampx(double v) const { return static_cast<int>(std::clamp(v, 0.0, static_cast<double>(img_.width))); }
  int clampy(double v) const { return static_cast<int>(std::clamp(v, 0.0, static_cast<double>(img_.height))); }

  Image img_;
};

}  // namespace detail

/// Rasterizes at dpi/96 pixels per canvas unit.
inline Image rasterize(const DisplayList& dl, double dpi = 96.0) {
  if (!(dpi > 0.0)) throw Error(errc::kInvalidInput, "dpi must be positive");
  const double k = dpi / 96.0;
  const int w = std::max(1, static_cast<int>(std::lround(dl.width * k)));
  const int h = std::max(1, static_cast<int>(std::lround(dl.height * k)));
  detail::Canvas cv(w, h);
  auto sc = [k](Point p) { return Point{p.x * k, p.y * k}; };
  for (const auto& sh : dl.shapes) {
    switch (sh.kind) {
      case Shape::Kind::rect: {
        const Point o = sc(sh.pts[0]), sz = sc(sh.pts[1]);
        cv.fill_rect(o.x, o.y, o.x + sz.x, o.y + sz.y, detail::parse_color(sh.fill));
        break;
      }
      case Shape::Kind::line:
        cv.stroke_segment(sc(sh.pts[0]), sc(sh.pts[1]), sh.stroke_width * k, detail::parse_color(sh.stroke));
        break;
      case Shape::Kind::polygon: {
        std::vector<Point> v;
        for (const Point& p : sh.pts) v.push_back(sc(p));
        cv.fill_polygon(v, detail::parse_color(sh.fill));
        break;
      }
      case Shape::Kind::polyline: {
        const auto col = detail::parse_color(sh.stroke);
        for (std::size_t i = 1; i < sh.pts.size(); ++i)
          cv.stroke_segment(sc(sh.pts[i - 1]), sc(sh.pts[i]), sh.stroke_width * k, col);
        break;
      }
      case Shape::Kind::circle:
        cv.fill_circle(sc(sh.pts[0]), sh.radius * k, detail::parse_color(sh.fill));
        break;
      case Shape::Kind::text:
        cv.draw_text(sc(sh.pts[0]), sh.radius * k, sh.text, detail::parse_color(sh.fill));
        break;
    }
  }
  return cv.take();
}

}  // namespace pathforge

#endif  // PATHFORGE_RENDER_HPP
