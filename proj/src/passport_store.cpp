// Copyright 2026 The wbms Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wbms/passport_store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

#include "wbms/error.hpp"
#include "wbms/json_io.hpp"

namespace wbms {
namespace {

using nlohmann::json;

[[noreturn]] void io_fail(const std::string& what, const std::filesystem::path& p) {
  throw Error(ErrorCode::kStoreError, what + " " + p.string() + ": " + std::strerror(errno));
}

class LockedFd {
 public:
  LockedFd(const std::filesystem::path& p, int flags, int lock) : path_(p) {
    fd_ = ::open(p.c_str(), flags | O_CLOEXEC, 0644);
    if (fd_ < 0) io_fail("cannot open", p);
    if (::flock(fd_, lock) != 0) {
      ::close(fd_);
      io_fail("cannot lock", p);
    }
  }
  ~LockedFd() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  LockedFd(const LockedFd&) = delete;
  LockedFd& operator=(const LockedFd&) = delete;

  int fd() const { return fd_; }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

diag::PackId parse_pack_id(const json& j) {
  Bytes b = from_hex(j.get<std::string>());
  diag::PackId id{};
  if (b.size() != id.size()) throw std::invalid_argument("pack id must be 8 bytes");
  std::copy(b.begin(), b.end(), id.begin());
  return id;
}

}  // namespace

PassportEntry make_entry(const diag::DiagPacket& packet, std::string session_id) {
  PassportEntry e;
  e.diag = packet;
  e.session_id = std::move(session_id);
  e.source = packet.use_case;
  for (const auto& r : packet.reports) {
    e.pack_ids.push_back(r.pack_id);
    e.received_at = std::max(e.received_at, r.timestamp);
  }
  if (!e.pack_ids.empty()) e.pack_id = e.pack_ids.front();
  return e;
}

std::string entry_to_line(const PassportEntry& e) {
  json ids = json::array();
  for (const auto& id : e.pack_ids) ids.push_back(to_hex(id));
  json j{{"pack_id", to_hex(e.pack_id)},
         {"pack_ids", ids},
         {"received_at", e.received_at},
         {"session_id", e.session_id},
         {"source", diag::to_string(e.source)},
         {"diag", json_io::to_json(e.diag)}};
  return j.dump();
}

PassportEntry entry_from_line(const std::string& line) {
  json j = json::parse(line);
  PassportEntry e;
  e.pack_id = parse_pack_id(j.at("pack_id"));
  for (const auto& id : j.at("pack_ids")) e.pack_ids.push_back(parse_pack_id(id));
  e.received_at = j.at("received_at").get<std::uint64_t>();
  e.session_id = j.at("session_id").get<std::string>();
  e.diag = json_io::packet_from_json(j.at("diag"));
  if (j.at("source").get<std::string>() != diag::to_string(e.diag.use_case)) {
    throw std::invalid_argument("source does not match packet use case");
  }
  e.source = e.diag.use_case;
  return e;
}

void PassportStore::append(const std::vector<PassportEntry>& entries) const {
  std::string buf;
  for (const auto& e : entries) buf += entry_to_line(e) + "\n";
  LockedFd f(path_, O_WRONLY | O_CREAT | O_APPEND, LOCK_EX);
  std::size_t done = 0;
  while (done < buf.size()) {
    ssize_t n = ::write(f.fd(), buf.data() + done, buf.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("cannot write", path_);
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(f.fd()) != 0) io_fail("cannot sync", path_);
}

std::vector<PassportEntry> PassportStore::load() const {
  std::vector<PassportEntry> out;
  if (!std::filesystem::exists(path_)) return out;
  LockedFd f(path_, O_RDONLY, LOCK_SH);
  std::string content;
  char chunk[4096];
  for (;;) {
    ssize_t n = ::read(f.fd(), chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("cannot read", path_);
    }
    if (n == 0) break;
    content.append(chunk, static_cast<std::size_t>(n));
  }
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    std::string line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(entry_from_line(line));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kStoreError, path_.string() + " line " + std::to_string(line_no) +
                                              ": " + e.what());
    }
  }
  return out;
}

std::vector<PassportEntry> PassportStore::history(const diag::PackId& pack_id) const {
  std::vector<PassportEntry> out;
  for (auto& e : load()) {
    if (std::find(e.pack_ids.begin(), e.pack_ids.end(), pack_id) != e.pack_ids.end()) {
      out.push_back(std::move(e));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const PassportEntry& a, const PassportEntry& b) {
    return a.received_at < b.received_at;
  });
  return out;
}

}  // namespace wbms
