#pragma once

#include <filesystem>

namespace prodspace::cli {

/// Exclusive advisory lock on `<dir>/.lock`, held for the object's lifetime.
/// Blocks until any other process holding it lets go.
class DirLock {
 public:
  explicit DirLock(const std::filesystem::path& dir);
  ~DirLock();
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace prodspace::cli
