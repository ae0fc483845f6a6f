#include "cafegb/profiler.hpp"

#include <algorithm>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <thread>

#include <unistd.h>

#include "cafegb/format.hpp"

namespace cafegb::profiler {

std::optional<std::uint64_t> current_rss_bytes() {
  std::ifstream statm("/proc/self/statm");
  std::uint64_t size = 0, resident = 0;
  if (!(statm >> size >> resident)) return std::nullopt;
  const long page = ::sysconf(_SC_PAGESIZE);
  if (page <= 0) return std::nullopt;
  return resident * static_cast<std::uint64_t>(page);
}

struct Scope::Window {
  std::uint64_t peak = 0;
};

namespace {

constexpr double kMiB = 1024.0 * 1024.0;

// One process-wide sampler thread, started on first use.
class Sampler {
 public:
  static Sampler& instance() {
    static Sampler s;
    return s;
  }

  bool available() const noexcept { return available_; }

  void attach(const std::shared_ptr<Scope::Window>& w) {
    std::lock_guard lock(mu_);
    windows_.push_back(w);
    if (!thread_.joinable() && available_) thread_ = std::thread([this] { loop(); });
  }

  void detach(const std::shared_ptr<Scope::Window>& w) {
    std::lock_guard lock(mu_);
    windows_.erase(std::remove(windows_.begin(), windows_.end(), w), windows_.end());
  }

  // Records one reading into every open window.
  void observe() {
    const auto rss = current_rss_bytes();
    if (!rss) return;
    std::lock_guard lock(mu_);
    for (auto& w : windows_) w->peak = std::max(w->peak, *rss);
  }

  ~Sampler() {
    {
      std::lock_guard lock(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    if (thread_.joinable()) thread_.join();
  }

 private:
  Sampler() : available_(current_rss_bytes().has_value()) {}

  void loop() {
    std::unique_lock lock(mu_);
    while (!stop_) {
      cv_.wait_for(lock, std::chrono::milliseconds(1000 / kSamplerHz));
      if (stop_) break;
      lock.unlock();
      observe();
      lock.lock();
    }
  }

  bool available_;
  std::mutex mu_;
  std::condition_variable cv_;
  bool stop_ = false;
  std::vector<std::shared_ptr<Scope::Window>> windows_;
  std::thread thread_;
};

}  // namespace

Scope::Scope(std::string stage, std::string dataset, std::uint64_t seed)
    : window_(std::make_shared<Window>()) {
  profile_.stage = std::move(stage);
  profile_.dataset = std::move(dataset);
  profile_.seed = seed;
  auto& sampler = Sampler::instance();
  if (sampler.available()) {
    if (const auto rss = current_rss_bytes()) {
      window_->peak = *rss;
      profile_.start_memory_mb = static_cast<double>(*rss) / kMiB;
    }
    sampler.attach(window_);
  }
  start_ = std::chrono::steady_clock::now();
}

Scope::~Scope() {
  if (!done_) Sampler::instance().detach(window_);
}

StageProfile Scope::finish() {
  if (done_) return profile_;
  const auto end = std::chrono::steady_clock::now();
  profile_.runtime_s = std::chrono::duration<double>(end - start_).count();
  auto& sampler = Sampler::instance();
  if (sampler.available()) {
    sampler.observe();  // final read
    sampler.detach(window_);
    profile_.peak_memory_mb = static_cast<double>(window_->peak) / kMiB;
  }
  done_ = true;
  return profile_;
}

std::string Recorder::to_csv() const {
  std::string out = "stage,dataset,seed,runtime_s,peak_memory_mb\n";
  for (const auto& p : records_) {
    out += p.stage + "," + p.dataset + "," + std::to_string(p.seed) + "," +
           format_fixed(p.runtime_s, 3) + "," +
           (p.peak_memory_mb ? format_fixed(*p.peak_memory_mb, 1) : std::string("NA")) + "\n";
  }
  return out;
}

}  // namespace cafegb::profiler
