#pragma once

// Append-only newline-delimited JSON file. Each record is flushed before
// append() returns, so a killed process loses at most a partially written
// final line, which is discarded when the file is reopened.

#include <filesystem>
#include <fstream>
#include <mutex>
#include <vector>

#include "shoplift/json_fields.hpp"

namespace shoplift {

class NdjsonLog {
 public:
  // Opens (creating if needed) the file and returns the records already in it.
  // A malformed final line is treated as a torn write and truncated away; a
  // malformed line anywhere else throws Error.
  explicit NdjsonLog(std::filesystem::path path);

  NdjsonLog(const NdjsonLog&) = delete;
  NdjsonLog& operator=(const NdjsonLog&) = delete;

  const std::vector<Json>& recovered() const { return recovered_; }
  void release_recovered() { std::vector<Json>().swap(recovered_); }

  void append(const Json& record);

  // Atomically replaces the whole file with the given records.
  void rewrite(const std::vector<Json>& records);

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::vector<Json> recovered_;
  std::mutex mutex_;
  std::ofstream out_;
};

}  // namespace shoplift
