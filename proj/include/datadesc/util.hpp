#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace datadesc {

/// 64-bit FNV-1a. Stable across platforms and runs, used for prompt keys
/// and content-addressed directory names.
std::uint64_t stable_hash(std::string_view text) noexcept;
std::string stable_hash_hex(std::string_view text);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);
std::vector<std::string> split(std::string_view text, char delimiter);
std::string join(const std::vector<std::string>& parts, std::string_view separator);

/// Python-style float rendering: shortest round-trip digits, always with a
/// decimal point or exponent ("27.0", "2.78", "1e+16").
std::string format_float(double value);

/// Runs `fn(i)` for i in [0, count) on at most `workers` threads and returns
/// once all calls finished. The first exception thrown by any call is
/// rethrown after the join.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
    if (count == 0) return;
    workers = std::clamp<std::size_t>(workers, 1, count);
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace datadesc
