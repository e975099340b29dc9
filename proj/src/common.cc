#include "rankscope/common.hh"

#include <cstdlib>
#include <sstream>

namespace rankscope {

int thread_count() {
  if (const char* env = std::getenv("RANKSCOPE_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? (int)hw : 1;
}

void run_chunks(int64_t total, int64_t grain,
                const std::function<void(int, int64_t, int64_t)>& fn) {
  if (total <= 0) return;
  if (grain < 1) grain = 1;
  int chunks = (int)((total + grain - 1) / grain);
  int workers = std::min<int>(thread_count(), chunks);
  if (workers <= 1) {
    for (int c = 0; c < chunks; ++c)
      fn(c, (int64_t)c * grain, std::min<int64_t>(total, (int64_t)(c + 1) * grain));
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        int c = next.fetch_add(1);
        if (c >= chunks) return;
        fn(c, (int64_t)c * grain, std::min<int64_t>(total, (int64_t)(c + 1) * grain));
      }
    });
  for (auto& t : pool) t.join();
}

std::string format_complex(cplx v) {
  std::ostringstream os;
  os.precision(17);
  os << (double)v.real();
  if (v.imag() >= 0)
    os << "+" << (double)v.imag() << "i";
  else
    os << "-" << (double)(-v.imag()) << "i";
  return os.str();
}

}  // namespace rankscope
