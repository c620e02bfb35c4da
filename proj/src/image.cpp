#include "dynastride/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace dynastride {

namespace {

// One output row of the bilinear resample. Shared by both variants so the
// parallel kernel cannot drift from the serial reference.
void resize_row(const Frame& src, Frame& dst, int oy, double sy_scale, double sx_scale) {
  const int c = src.channels;
  double sy = (oy + 0.5) * sy_scale - 0.5;
  sy = std::clamp(sy, 0.0, static_cast<double>(src.height - 1));
  const int y0 = static_cast<int>(sy);
  const int y1 = std::min(y0 + 1, src.height - 1);
  const double fy = sy - y0;
  for (int ox = 0; ox < dst.width; ++ox) {
    double sx = (ox + 0.5) * sx_scale - 0.5;
    sx = std::clamp(sx, 0.0, static_cast<double>(src.width - 1));
    const int x0 = static_cast<int>(sx);
    const int x1 = std::min(x0 + 1, src.width - 1);
    const double fx = sx - x0;
    for (int ch = 0; ch < c; ++ch) {
      const double top = src.at(y0, x0, ch) * (1.0 - fx) + src.at(y0, x1, ch) * fx;
      const double bot = src.at(y1, x0, ch) * (1.0 - fx) + src.at(y1, x1, ch) * fx;
      const double val = top * (1.0 - fy) + bot * fy;
      dst.at(oy, ox, ch) = static_cast<std::uint8_t>(std::lround(std::clamp(val, 0.0, 255.0)));
    }
  }
}

void check_resize_args(const Frame& src, int out_h, int out_w) {
  if (src.empty()) throw ValidationError("resize: empty source frame");
  if (out_h < 1 || out_w < 1) throw ConfigError("resize: output side must be >= 1");
}

void check_concat_args(const std::vector<Frame>& frames) {
  if (frames.empty()) throw LogicError("hconcat: no frames");
  for (const Frame& f : frames) {
    if (f.height != frames.front().height || f.channels != frames.front().channels) {
      throw ValidationError("hconcat: frames differ in height or channel count");
    }
  }
}

int total_width(const std::vector<Frame>& frames) {
  int w = 0;
  for (const Frame& f : frames) w += f.width;
  return w;
}

void concat_row(const std::vector<Frame>& frames, Frame& dst, int y) {
  const int c = dst.channels;
  std::uint8_t* out = dst.pixels.data() + static_cast<std::size_t>(y) * dst.width * c;
  for (const Frame& f : frames) {
    const std::uint8_t* in = f.pixels.data() + static_cast<std::size_t>(y) * f.width * c;
    std::memcpy(out, in, static_cast<std::size_t>(f.width) * c);
    out += static_cast<std::size_t>(f.width) * c;
  }
}

}  // namespace

Frame resize_bilinear_serial(const Frame& src, int out_h, int out_w) {
  check_resize_args(src, out_h, out_w);
  if (out_h == src.height && out_w == src.width) return src;
  Frame dst(out_h, out_w, src.channels);
  const double sy_scale = static_cast<double>(src.height) / out_h;
  const double sx_scale = static_cast<double>(src.width) / out_w;
  for (int oy = 0; oy < out_h; ++oy) {
    resize_row(src, dst, oy, sy_scale, sx_scale);
  }
  return dst;
}

Frame resize_bilinear(const Frame& src, int out_h, int out_w) {
  check_resize_args(src, out_h, out_w);
  if (out_h == src.height && out_w == src.width) return src;
  Frame dst(out_h, out_w, src.channels);
  const double sy_scale = static_cast<double>(src.height) / out_h;
  const double sx_scale = static_cast<double>(src.width) / out_w;
#pragma omp parallel for schedule(static)
  for (int oy = 0; oy < out_h; ++oy) {
    resize_row(src, dst, oy, sy_scale, sx_scale);
  }
  return dst;
}

Frame hconcat_serial(const std::vector<Frame>& frames) {
  check_concat_args(frames);
  Frame dst(frames.front().height, total_width(frames), frames.front().channels);
  for (int y = 0; y < dst.height; ++y) {
    concat_row(frames, dst, y);
  }
  return dst;
}

Frame hconcat_frames(const std::vector<Frame>& frames) {
  check_concat_args(frames);
  Frame dst(frames.front().height, total_width(frames), frames.front().channels);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < dst.height; ++y) {
    concat_row(frames, dst, y);
  }
  return dst;
}

}  // namespace dynastride
