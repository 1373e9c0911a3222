#pragma once

namespace harmo {

template <class FW>
double integrate_boundary(const TensorField& f, FW&& face_weight) {
  const GridSpec& g = f.grid();
  const int n = g.dim();
  double total = 0.0;
  for (int a = 0; a < n; ++a) {
    if (g.periodic(a)) continue;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const int ia = g.coord_index(k, a);
      if (ia != 0 && ia != g.shape()[a] - 1) continue;
      double w = 1.0;
      for (int b = 0; b < n; ++b) {
        if (b == a) continue;
        w *= g.spacing()[b];
        if (!g.periodic(b)) {
          const int ib = g.coord_index(k, b);
          if (ib == 0 || ib == g.shape()[b] - 1) w *= 0.5;
        }
      }
      total += f(k, 0) * w * face_weight(k, a);
    }
  }
  return total;
}

}  // namespace harmo
