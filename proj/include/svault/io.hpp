// Copyright (c) 2026, the svault authors
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

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "svault/errors.hpp"

namespace svault {

/// Append-only file handle with explicit durability.
class AppendFile {
 public:
  AppendFile() = default;

  explicit AppendFile(const std::filesystem::path& path) { open(path); }

  AppendFile(const AppendFile&) = delete;
  AppendFile& operator=(const AppendFile&) = delete;
  AppendFile(AppendFile&& other) noexcept : fd_(other.fd_), path_(std::move(other.path_)) {
    other.fd_ = -1;
  }
  AppendFile& operator=(AppendFile&& other) noexcept {
    if (this != &other) {
      close();
      fd_ = other.fd_;
      path_ = std::move(other.path_);
      other.fd_ = -1;
    }
    return *this;
  }

  ~AppendFile() { close(); }

  void open(const std::filesystem::path& path) {
    close();
    path_ = path;
    fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) throw IoError("cannot open for append: " + path.string() + ": " + std::strerror(errno));
  }

  bool is_open() const { return fd_ >= 0; }

  void append(const void* data, std::size_t len) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    while (len > 0) {
      const ssize_t n = ::write(fd_, p, len);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw IoError("write failed: " + path_.string() + ": " + std::strerror(errno));
      }
      p += n;
      len -= static_cast<std::size_t>(n);
    }
  }

  void sync() {
    if (fd_ >= 0 && ::fsync(fd_) != 0)
      throw IoError("fsync failed: " + path_.string() + ": " + std::strerror(errno));
  }

  void close() {
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_ = -1;
  std::filesystem::path path_;
};

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  const int fd = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd < 0) throw IoError("cannot open: " + path.string() + ": " + std::strerror(errno));
  std::vector<std::uint8_t> bytes;
  std::uint8_t buf[1 << 16];
  for (;;) {
    const ssize_t n = ::read(fd, buf, sizeof(buf));
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw IoError("read failed: " + path.string() + ": " + std::strerror(errno));
    }
    if (n == 0) break;
    bytes.insert(bytes.end(), buf, buf + n);
  }
  ::close(fd);
  return bytes;
}

/// All-or-nothing file replacement: write to a temp sibling, fsync, rename.
inline void atomic_write_file(const std::filesystem::path& path,
                              const std::vector<std::uint8_t>& bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    AppendFile f;
    ::unlink(tmp.c_str());
    f.open(tmp);
    if (!bytes.empty()) f.append(bytes.data(), bytes.size());
    f.sync();
  }
  if (::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoError("rename failed: " + tmp.string() + " -> " + path.string() + ": " +
                  std::strerror(errno));
}

}  // namespace svault
