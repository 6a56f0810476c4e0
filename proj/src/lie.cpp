#include <cmath>
#include <limits>

#include "kgt/errors.hpp"
#include "kgt/hamiltonian.hpp"

namespace kgt {

LieResult lie_transform(const Hamiltonian& h, const Hamiltonian& f, const LieOptions& opts) {
  LieResult out;
  out.value = h;
  double h_norm = norm(h, opts.ctx);
  out.term_norms.push_back(h_norm);
  double tol = opts.tail_tol >= 0.0 ? opts.tail_tol : 1e-16 * h_norm;

  Hamiltonian term = h;
  for (int n = 1; n <= opts.max_brackets; ++n) {
    term = poisson_bracket(term, f, opts.policy).scaled(1.0 / n);
    out.brackets = n;
    double tn = norm(term, opts.ctx);
    out.term_norms.push_back(tn);
    if (term.empty()) {
      out.tail_bound = 0.0;
      return out;
    }
    out.value = out.value + term;
    if (n >= 10 && tn >= out.term_norms[n - 1])
      throw NoContraction("Lie series term norms stopped decreasing at bracket " + std::to_string(n));
    if (tn <= tol) break;
  }

  std::size_t m = out.term_norms.size();
  if (m < 2) {
    out.tail_bound = std::numeric_limits<double>::infinity();
    return out;
  }
  double last = out.term_norms[m - 1];
  double prev = out.term_norms[m - 2];
  double q = prev > 0.0 ? last / prev : 0.0;
  out.tail_bound = q < 1.0 ? last * q / (1.0 - q) : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace kgt
