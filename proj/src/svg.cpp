#include "arzlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace arzlab {

namespace {

struct Rgb {
  int r, g, b;
};

// diverging blue -> white -> red over s in [0, 1]
Rgb colormap(double s) {
  s = std::clamp(s, 0.0, 1.0);
  auto lerp = [](int a, int b, double w) {
    return static_cast<int>(std::lround(a + (b - a) * w));
  };
  if (s < 0.5) {
    const double w = s * 2;
    return {lerp(42, 245, w), lerp(72, 245, w), lerp(166, 245, w)};
  }
  const double w = (s - 0.5) * 2;
  return {lerp(245, 188, w), lerp(245, 44, w), lerp(245, 42, w)};
}

}  // namespace

void write_heatmap_svg(const std::string& path, const ScenarioResult& r,
                       const std::string& field) {
  const bool is_rho = field == "rho";
  if (!is_rho && field != "v") throw DomainError("field must be 'rho' or 'v'");
  const int nt = r.n_t(), nx = r.n_x();
  if (nt < 2 || nx < 2) throw DomainError("trajectory too small for a heatmap");

  const std::vector<double>& data = is_rho ? r.rho : r.v;
  const double scale = is_rho ? 1000.0 : 3.6;  // SI -> veh/km or km/h
  double lo = data[0], hi = data[0];
  for (double d : data) {
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  if (hi - lo < 1e-12) hi = lo + 1e-12;

  const int pw = 640, ph = 420;          // plot area
  const int ml = 70, mt = 40, mb = 50;   // margins
  const int width = ml + pw + 90, height = mt + ph + mb;
  const double cw = static_cast<double>(pw) / nt;
  const double ch = static_cast<double>(ph) / nx;

  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot write " + path);
  std::fprintf(f,
               "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" "
               "height=\"%d\" font-family=\"sans-serif\" font-size=\"13\">\n",
               width, height);
  std::fprintf(f, "<rect width=\"%d\" height=\"%d\" fill=\"white\"/>\n", width,
               height);
  std::fprintf(f,
               "<text x=\"%d\" y=\"24\" font-size=\"15\">%s(x,t) [%s]</text>\n",
               ml, is_rho ? "density" : "speed", is_rho ? "veh/km" : "km/h");

  for (int it = 0; it < nt; ++it) {
    for (int ix = 0; ix < nx; ++ix) {
      const double val = data[it * nx + ix];
      const Rgb c = colormap((val - lo) / (hi - lo));
      // x axis: time, y axis: position (origin bottom-left)
      std::fprintf(f,
                   "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                   "fill=\"rgb(%d,%d,%d)\"/>\n",
                   ml + it * cw, mt + ph - (ix + 1) * ch, cw + 0.5, ch + 0.5,
                   c.r, c.g, c.b);
    }
  }

  // axes and tick labels
  std::fprintf(f,
               "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" "
               "fill=\"none\" stroke=\"black\"/>\n",
               ml, mt, pw, ph);
  for (int k = 0; k <= 4; ++k) {
    const double tt = r.t.front() + k * (r.t.back() - r.t.front()) / 4;
    const double xx = r.x.front() + k * (r.x.back() - r.x.front()) / 4;
    std::fprintf(f,
                 "<text x=\"%.0f\" y=\"%d\" text-anchor=\"middle\">%.0f</text>\n",
                 ml + k * (pw / 4.0), mt + ph + 18, tt);
    std::fprintf(f,
                 "<text x=\"%d\" y=\"%.0f\" text-anchor=\"end\">%.0f</text>\n",
                 ml - 6, mt + ph - k * (ph / 4.0) + 4, xx);
  }
  std::fprintf(f,
               "<text x=\"%d\" y=\"%d\" text-anchor=\"middle\">t [s]</text>\n",
               ml + pw / 2, mt + ph + 38);
  std::fprintf(f,
               "<text x=\"16\" y=\"%d\" text-anchor=\"middle\" "
               "transform=\"rotate(-90 16 %d)\">x [m]</text>\n",
               mt + ph / 2, mt + ph / 2);

  // colorbar
  const int cb_x = ml + pw + 20, cb_w = 16;
  for (int k = 0; k < 100; ++k) {
    const Rgb c = colormap(1.0 - k / 99.0);
    std::fprintf(f,
                 "<rect x=\"%d\" y=\"%.2f\" width=\"%d\" height=\"%.2f\" "
                 "fill=\"rgb(%d,%d,%d)\"/>\n",
                 cb_x, mt + k * (ph / 100.0), cb_w, ph / 100.0 + 0.5, c.r, c.g,
                 c.b);
  }
  std::fprintf(f, "<text x=\"%d\" y=\"%d\">%.1f</text>\n", cb_x + cb_w + 4,
               mt + 10, hi * scale);
  std::fprintf(f, "<text x=\"%d\" y=\"%d\">%.1f</text>\n", cb_x + cb_w + 4,
               mt + ph, lo * scale);
  std::fprintf(f, "</svg>\n");
  std::fclose(f);
}

}  // namespace arzlab
