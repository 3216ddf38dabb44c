#include <atomic>
#include <charconv>
#include <iostream>

#include "pmax/error.hpp"
#include "pmax/random.hpp"
#include "pmax/text.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pmax {

namespace {
std::atomic<bool> g_quiet{false};
}

namespace diag {
void warn(const std::string& msg) {
  if (!g_quiet.load(std::memory_order_relaxed)) std::cerr << "warning: " << msg << '\n';
}
void set_quiet(bool quiet) { g_quiet.store(quiet, std::memory_order_relaxed); }
bool quiet() { return g_quiet.load(std::memory_order_relaxed); }
}  // namespace diag

void set_workers(int workers) {
#ifdef _OPENMP
  omp_set_num_threads(workers < 1 ? 1 : workers);
#else
  (void)workers;
#endif
}

std::string format_number(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc{} ? std::string(buf, end) : std::to_string(x);
}

int workers() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace pmax
