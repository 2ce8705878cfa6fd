#include "coatlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "coatlab/types.hpp"

namespace coatlab::quad {

namespace {

// Kronrod 15 nodes (non-negative half) with Kronrod and embedded Gauss weights.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double s = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

Result gauss_kronrod(const std::function<double(double)>& f, double a, double b, double rel_tol,
                     double abs_tol, int max_intervals) {
  std::priority_queue<Segment> heap;
  Result out;
  Segment first = gk15(f, a, b);
  out.evaluations = 15;
  heap.push(first);
  double total = first.value;
  double error = first.error;
  while (error > std::max(abs_tol, rel_tol * std::abs(total)) &&
         static_cast<int>(heap.size()) < max_intervals) {
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    Segment left = gk15(f, worst.a, mid);
    Segment right = gk15(f, mid, worst.b);
    out.evaluations += 30;
    heap.push(left);
    heap.push(right);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
  }
  // Final sums from scratch, smallest magnitudes first.
  std::vector<double> values;
  values.reserve(heap.size());
  error = 0.0;
  while (!heap.empty()) {
    values.push_back(heap.top().value);
    error += heap.top().error;
    heap.pop();
  }
  std::sort(values.begin(), values.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
  total = 0.0;
  for (double v : values) total += v;
  out.value = total;
  out.abs_error = error;
  out.converged = error <= std::max(abs_tol, rel_tol * std::abs(total));
  return out;
}

GaussLegendre gauss_legendre(int n) {
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

const std::array<TrianglePoint, 7>& triangle_rule7() {
  static const std::array<TrianglePoint, 7> rule = [] {
    const double a1 = 0.059715871789769820459117580973106, b1 = 0.470142064105115089770441209513447;
    const double w1 = 0.132394152788506181334464793049408;
    const double a2 = 0.797426985353087322398025276169754, b2 = 0.101286507323456338800987361915123;
    const double w2 = 0.125939180544827152595683945500181;
    return std::array<TrianglePoint, 7>{{
        {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225},
        {a1, b1, b1, w1},
        {b1, a1, b1, w1},
        {b1, b1, a1, w1},
        {a2, b2, b2, w2},
        {b2, a2, b2, w2},
        {b2, b2, a2, w2},
    }};
  }();
  return rule;
}

}  // namespace coatlab::quad
