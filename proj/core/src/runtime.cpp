#include "crackcell/runtime.hpp"

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

#include "crackcell/error.hpp"
#include "crackcell/log.hpp"

namespace crackcell {

namespace {

int initial_threads() {
  if (const char* env = std::getenv("CRACKCELL_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 0;
}

std::atomic<int> g_threads{initial_threads()};
std::atomic<LogLevel> g_log_level{LogLevel::Info};
std::mutex g_log_mutex;

}  // namespace

int num_threads() {
  int n = g_threads.load();
  if (n <= 0) {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
  }
  return n;
}

void set_num_threads(int n) { g_threads.store(n); }

void parallel_for(std::int64_t n,
                  const std::function<void(std::int64_t, std::int64_t)>& chunk_fn) {
  if (n <= 0) return;
  const std::int64_t nchunks = (n + kParallelChunk - 1) / kParallelChunk;
  const int workers = static_cast<int>(
      std::min<std::int64_t>(num_threads(), nchunks));
  if (workers <= 1) {
    for (std::int64_t c = 0; c < nchunks; ++c) {
      const std::int64_t b = c * kParallelChunk;
      chunk_fn(b, std::min(n, b + kParallelChunk));
    }
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<bool> failed{false};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::int64_t c = next.fetch_add(1);
        if (c >= nchunks || failed.load(std::memory_order_relaxed)) return;
        const std::int64_t b = c * kParallelChunk;
        try {
          chunk_fn(b, std::min(n, b + kParallelChunk));
        } catch (...) {
          failed.store(true);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load()) throw Error("parallel_for: worker threw");
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

LogLevel log_level() { return g_log_level.load(); }
void set_log_level(LogLevel level) { g_log_level.store(level); }

LogLevel parse_log_level(const std::string& name) {
  if (name == "debug") return LogLevel::Debug;
  if (name == "info") return LogLevel::Info;
  if (name == "warn") return LogLevel::Warn;
  if (name == "error") return LogLevel::Error;
  if (name == "quiet") return LogLevel::Quiet;
  throw Error("unknown log level '" + name +
              "' (expected debug|info|warn|error|quiet)");
}

namespace detail {
void log_write(LogLevel level, const std::string& msg) {
  static const char* tags[] = {"debug", "info", "warn", "error"};
  std::lock_guard<std::mutex> lock(g_log_mutex);
  std::ostream& os = level >= LogLevel::Warn ? std::cerr : std::clog;
  os << "[" << tags[static_cast<int>(level)] << "] " << msg << "\n";
}
}  // namespace detail

}  // namespace crackcell
