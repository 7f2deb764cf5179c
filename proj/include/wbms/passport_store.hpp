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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wbms/diagnostics.hpp"

namespace wbms {

// One delivered diagnostic packet, as persisted in the passport log.
struct PassportEntry {
  diag::PackId pack_id{};             // first report's pack
  std::vector<diag::PackId> pack_ids;  // every pack in the packet
  std::uint64_t received_at = 0;
  diag::DiagPacket diag;
  std::string session_id;
  diag::UseCase source = diag::UseCase::kActiveDiag;
};

// Builds the entry for a packet; received_at is the newest report timestamp.
PassportEntry make_entry(const diag::DiagPacket& packet, std::string session_id);

// Append-only newline-delimited JSON log. Each call takes an flock on the
// file for its duration; appends are flushed and synced before returning.
// I/O failures and unparsable lines throw Error(kStoreError).
class PassportStore {
 public:
  explicit PassportStore(std::filesystem::path path) : path_(std::move(path)) {}

  const std::filesystem::path& path() const { return path_; }

  void append(const PassportEntry& entry) const { append(std::vector<PassportEntry>{entry}); }
  void append(const std::vector<PassportEntry>& entries) const;

  // All entries in file order. A missing file is an empty store.
  std::vector<PassportEntry> load() const;

  // Entries naming pack_id, ordered by received_at; ties keep file order.
  std::vector<PassportEntry> history(const diag::PackId& pack_id) const;

 private:
  std::filesystem::path path_;
};

std::string entry_to_line(const PassportEntry& entry);
PassportEntry entry_from_line(const std::string& line);

}  // namespace wbms
