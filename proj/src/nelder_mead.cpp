#include "volseg/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace volseg {

namespace {

double guarded(const std::function<double(const Vector&)>& f, const Vector& x,
               long& n_eval) {
  ++n_eval;
  double v = f(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(const Vector&)>& f,
                          const Vector& start, const SimplexOptions& opts) {
  const Index dim = start.size();
  const double reflect = 1.0, expand = 2.0, contract = 0.5, shrink = 0.5;

  std::vector<Vector> verts(static_cast<std::size_t>(dim + 1), start);
  for (Index i = 0; i < dim; ++i) verts[static_cast<std::size_t>(i + 1)][i] += opts.init_step;

  long n_eval = 0;
  std::vector<double> vals(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) vals[i] = guarded(f, verts[i], n_eval);

  std::vector<std::size_t> order(verts.size());
  std::iota(order.begin(), order.end(), 0);
  auto sort_order = [&] {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
  };

  SimplexResult result;
  while (n_eval < opts.max_eval) {
    sort_order();
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[order.size() - 2];

    double diameter = 0.0;
    for (std::size_t i = 1; i < order.size(); ++i) {
      diameter = std::max(diameter, (verts[order[i]] - verts[best]).norm());
    }
    if (diameter <= opts.rel_tol * (1.0 + verts[best].norm())) {
      result.converged = true;
      break;
    }

    Vector centroid = Vector::Zero(dim);
    for (std::size_t i = 0; i + 1 < order.size(); ++i) centroid += verts[order[i]];
    centroid /= static_cast<double>(dim);

    Vector xr = centroid + reflect * (centroid - verts[worst]);
    double fr = guarded(f, xr, n_eval);

    if (fr < vals[best]) {
      Vector xe = centroid + expand * (xr - centroid);
      double fe = guarded(f, xe, n_eval);
      if (fe < fr) {
        verts[worst] = xe;
        vals[worst] = fe;
      } else {
        verts[worst] = xr;
        vals[worst] = fr;
      }
    } else if (fr < vals[second_worst]) {
      verts[worst] = xr;
      vals[worst] = fr;
    } else {
      bool outside = fr < vals[worst];
      Vector xc = outside ? Vector(centroid + contract * (xr - centroid))
                          : Vector(centroid - contract * (centroid - verts[worst]));
      double fc = guarded(f, xc, n_eval);
      if (fc < std::min(fr, vals[worst])) {
        verts[worst] = xc;
        vals[worst] = fc;
      } else {
        for (std::size_t i = 1; i < order.size(); ++i) {
          std::size_t v = order[i];
          verts[v] = verts[best] + shrink * (verts[v] - verts[best]);
          vals[v] = guarded(f, verts[v], n_eval);
        }
      }
    }
  }

  sort_order();
  result.x = verts[order.front()];
  result.value = vals[order.front()];
  result.n_eval = n_eval;
  return result;
}

}  // namespace volseg
