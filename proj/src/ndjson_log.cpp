#include "shoplift/ndjson_log.hpp"

namespace shoplift {

NdjsonLog::NdjsonLog(std::filesystem::path path) : path_(std::move(path)) {
  std::uintmax_t good_bytes = 0;
  bool torn = false;
  if (std::filesystem::exists(path_)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) {
      throw Error("cannot read log " + path_.string());
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const bool terminated = !in.eof();
      Json record = Json::parse(line, nullptr, false);
      if (record.is_discarded() || !terminated) {
        if (in.peek() != std::ifstream::traits_type::eof() && terminated) {
          throw Error(path_.string() + ": line " + std::to_string(line_no) + " is not valid JSON");
        }
        torn = true;
        break;
      }
      recovered_.push_back(std::move(record));
      good_bytes += line.size() + 1;
    }
  }
  if (torn) {
    std::filesystem::resize_file(path_, good_bytes);
  }
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) {
    throw Error("cannot open log " + path_.string() + " for append");
  }
}

void NdjsonLog::append(const Json& record) {
  const std::string line = record.dump() + "\n";
  std::lock_guard lock(mutex_);
  out_.write(line.data(), static_cast<std::streamsize>(line.size()));
  out_.flush();
  if (!out_) {
    throw Error("write to log " + path_.string() + " failed");
  }
}

void NdjsonLog::rewrite(const std::vector<Json>& records) {
  std::lock_guard lock(mutex_);
  std::filesystem::path tmp = path_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    for (const Json& r : records) {
      out << r.dump() << '\n';
    }
    out.flush();
    if (!out) {
      throw Error("cannot write " + tmp.string());
    }
  }
  out_.close();
  std::filesystem::rename(tmp, path_);
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) {
    throw Error("cannot reopen log " + path_.string());
  }
}

}  // namespace shoplift
