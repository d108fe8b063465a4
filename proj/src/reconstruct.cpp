#include "sauce/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sauce {

ImageD nearest_fill(const SparseImage& sparse) {
  if (sparse.empty()) throw InputError("nearest fill needs at least one kept point");
  sparse.validate();
  const int h = sparse.height;
  const int w = sparse.width;

  std::vector<int> owner(std::size_t(w) * h, -1);
  for (Eigen::Index k = 0; k < sparse.size(); ++k) {
    owner[std::size_t(sparse.positions[k].row) * w + sparse.positions[k].col] = int(k);
  }

  ImageD out(w, h, sparse.channels);
  const int max_radius = std::max(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      long best_d2 = -1;
      int best_row = 0, best_col = 0, best = -1;
      auto consider = [&](int rr, int cc) {
        if (rr < 0 || rr >= h || cc < 0 || cc >= w) return;
        const int k = owner[std::size_t(rr) * w + cc];
        if (k < 0) return;
        const long d2 = long(rr - r) * (rr - r) + long(cc - c) * (cc - c);
        if (best < 0 || d2 < best_d2 || (d2 == best_d2 && (rr < best_row || (rr == best_row && cc < best_col)))) {
          best_d2 = d2;
          best_row = rr;
          best_col = cc;
          best = k;
        }
      };
      // Expanding Chebyshev rings; a ring at radius rad cannot hold anything
      // closer than rad, so stop once rad exceeds the best distance found.
      for (int rad = 0; rad <= max_radius; ++rad) {
        if (best >= 0 && double(rad) > std::sqrt(double(best_d2))) break;
        if (rad == 0) {
          consider(r, c);
          continue;
        }
        for (int dc = -rad; dc <= rad; ++dc) {
          consider(r - rad, c + dc);
          consider(r + rad, c + dc);
        }
        for (int dr = -rad + 1; dr <= rad - 1; ++dr) {
          consider(r + dr, c - rad);
          consider(r + dr, c + rad);
        }
      }
      out.pixel(r, c) = sparse.values.row(best);
    }
  }
  return out;
}

ImageD zero_fill(const SparseImage& sparse) {
  sparse.validate();
  ImageD out(sparse.width, sparse.height, sparse.channels);
  for (Eigen::Index k = 0; k < sparse.size(); ++k) {
    out.pixel(sparse.positions[k].row, sparse.positions[k].col) = sparse.values.row(k);
  }
  return out;
}

}  // namespace sauce
