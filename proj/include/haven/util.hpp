#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

namespace haven {

using Json = nlohmann::json;

std::string read_file(const std::filesystem::path& path);  // throws Error(IoError)
void write_file(const std::filesystem::path& path, const std::string& text);

// One JSON value per non-blank line. Throws Error(IoError) on unreadable files
// and on malformed lines (the message names the line).
std::vector<Json> read_jsonl(const std::filesystem::path& path);
std::string to_jsonl_line(const Json& value);

std::string trim(const std::string& s);
std::vector<std::string> split_words(const std::string& s);  // whitespace-separated
bool starts_with(const std::string& s, const std::string& prefix);
bool ends_with(const std::string& s, const std::string& suffix);
std::string to_lower(std::string s);

std::string sha256_hex(const std::string& data);

// splitmix64 step; used to derive per-item seeds from a run seed.
uint64_t mix_seed(uint64_t seed, uint64_t index);

// Runs fn(i) for i in [0, count) on up to `workers` threads. Results are
// stored by index, so output order never depends on scheduling. The first
// exception thrown by any call is rethrown after all workers finish.
template <typename R>
std::vector<R> parallel_map(size_t count, int workers, const std::function<R(size_t)>& fn) {
  std::vector<std::optional<R>> slots(count);
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  size_t n = std::max<size_t>(1, std::min<size_t>(static_cast<size_t>(std::max(workers, 1)), count));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (size_t t = 0; t < n; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace haven
