#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace rankscope {

using cplx = std::complex<long double>;

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedField : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalGuard : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConsistencyFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotSquare : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotInDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidClass : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/* hard caps; exceeding any of them aborts a computation up front
   rather than letting it thrash. */
struct Limits {
  uint64_t code_space = uint64_t(1) << 28;
  uint64_t element_cap = 30'000'000;
  uint32_t class_cap = 4096;
  uint64_t induction_cap = 1'000'000;
  uint64_t flag_cap = 1'000'000;
  uint64_t brute_ft_cap = uint64_t(1) << 26;
  uint64_t convolution_cap = 10'000'000'000ull;
};

inline const Limits& default_limits() {
  static Limits lim;
  return lim;
}

/* accumulator for sums that must come out as (real) integers.
   finalization checks the imaginary part and the distance to the
   nearest integer against the tolerance and fails loudly. */
class GuardedInteger {
 public:
  explicit GuardedInteger(long double tol = 1e-6) : tol_(tol) {}

  void add(cplx term) { acc_ += term; }
  void add(long double term) { acc_ += term; }
  cplx raw() const { return acc_; }
  void set_tolerance(long double tol) { tol_ = tol; }

  int64_t round(const char* what = "guarded sum") const {
    long double re = acc_.real();
    long double target = std::round(re);
    if (std::fabs(acc_.imag()) > tol_ || std::fabs(re - target) > tol_)
      throw NumericalGuard(std::string(what) + ": value (" +
                           std::to_string((double)re) + ", " +
                           std::to_string((double)acc_.imag()) +
                           "i) is not an integer within " +
                           std::to_string((double)tol_));
    return (int64_t)target;
  }

 private:
  cplx acc_{0.0L, 0.0L};
  long double tol_;
};

inline int64_t guarded_round(cplx v, long double tol = 1e-6,
                             const char* what = "value") {
  GuardedInteger g(tol);
  g.add(v);
  return g.round(what);
}

int thread_count();

/* splits [0,total) into fixed-size chunks and runs them on a worker
   pool.  chunk geometry depends only on total and grain, so per-chunk
   results can be merged in chunk order for reproducible reductions. */
void run_chunks(int64_t total, int64_t grain,
                const std::function<void(int chunk, int64_t lo, int64_t hi)>& fn);

inline uint64_t ipow(uint64_t base, unsigned exp) {
  uint64_t r = 1;
  while (exp--) r *= base;
  return r;
}

std::string format_complex(cplx v);

}  // namespace rankscope
