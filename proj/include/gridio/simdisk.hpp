#pragma once

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <list>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_map>
#include <vector>

namespace gridio {

using u8 = std::uint8_t;
using u16 = std::uint16_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i32 = std::int32_t;
using i64 = std::int64_t;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Block size B and memory size M, both in bytes.
struct SimConfig {
  u64 block_bytes = 256;
  u64 memory_bytes = 65536;

  /// Throws unless B is a power of two and M >= B^2.
  void validate() const;
  u64 cache_blocks() const { return memory_bytes / block_bytes; }
};

struct IoCounters {
  u64 blocks_read = 0;
  u64 blocks_written = 0;
  u64 sequential_blocks = 0;
  u64 random_blocks = 0;
  u64 bytes_transferred = 0;

  IoCounters operator-(const IoCounters& o) const {
    return {blocks_read - o.blocks_read, blocks_written - o.blocks_written,
            sequential_blocks - o.sequential_blocks, random_blocks - o.random_blocks,
            bytes_transferred - o.bytes_transferred};
  }
  bool operator==(const IoCounters&) const = default;
};

struct FileId {
  u32 value = ~0u;
  bool operator==(const FileId&) const = default;
  bool valid() const { return value != ~0u; }
};

enum class Access { read, write };

/// Simulated external memory: named files carved into blocks, an LRU cache of
/// M/B blocks with write-back, and exact transfer counters.
class SimDisk {
 public:
  explicit SimDisk(SimConfig cfg);

  const SimConfig& config() const { return cfg_; }
  u64 block_bytes() const { return cfg_.block_bytes; }

  FileId open_file(std::string name);
  FileId file(std::string_view name) const;
  bool exists(std::string_view name) const;
  const std::string& name(FileId f) const { return files_.at(f.value).name; }
  u64 length(FileId f) const { return files_.at(f.value).data.size(); }
  std::vector<std::string> file_names() const;

  /// One block through the cache. For writes, payload replaces the block prefix.
  std::vector<std::byte> access_block(FileId f, u64 block, Access mode,
                                      std::span<const std::byte> payload = {});

  void read(FileId f, u64 offset, std::span<std::byte> out);
  void write(FileId f, u64 offset, std::span<const std::byte> in);

  template <class T>
  T read_pod(FileId f, u64 offset) {
    static_assert(std::is_trivially_copyable_v<T>);
    T v;
    read(f, offset, std::as_writable_bytes(std::span<T, 1>(&v, 1)));
    return v;
  }
  template <class T>
  void write_pod(FileId f, u64 offset, const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    write(f, offset, std::as_bytes(std::span<const T, 1>(&v, 1)));
  }

  /// Uncached transfers used by sequential streams; always counted.
  void stream_read_block(FileId f, u64 block, std::span<std::byte> out);
  void stream_write_block(FileId f, u64 block, std::span<const std::byte> in);

  /// Drop cached blocks [first, last] of f without writing them back.
  void discard(FileId f, u64 first, u64 last);
  /// Shrink f to the blocks covering [0, bytes); later blocks are dropped from the cache.
  void truncate(FileId f, u64 bytes);
  /// Write back every dirty block, in (file, block) order.
  void flush();

  IoCounters counters() const { return total_; }
  IoCounters file_counters(FileId f) const { return files_.at(f.value).counters; }
  void reset_counters();
  u64 cached_blocks() const { return lru_.size(); }

  /// Uncounted host access, for loading inputs and saving artifacts.
  std::vector<std::byte>& raw(FileId f) { return files_.at(f.value).data; }
  const std::vector<std::byte>& raw(FileId f) const { return files_.at(f.value).data; }
  void set_raw(FileId f, std::vector<std::byte> bytes);

 private:
  struct File {
    std::string name;
    std::vector<std::byte> data;
    std::optional<u64> last_block;
    IoCounters counters;
  };
  struct Slot {
    u64 key;
    bool dirty;
  };

  u64 key(FileId f, u64 block) const { return (u64(f.value) << 40) | block; }
  void count(u32 file, u64 block, Access mode);
  /// Makes the block resident; counts a read when `fetch` and it was absent.
  void touch(FileId f, u64 block, bool fetch, bool dirty);
  void ensure_length(File& file, u64 bytes);

  SimConfig cfg_;
  std::vector<File> files_;
  std::unordered_map<std::string, u32> by_name_;
  std::list<Slot> lru_;  // front = most recent
  std::unordered_map<u64, std::list<Slot>::iterator> where_;
  IoCounters total_;
};

/// Sequential reader with a private one-block buffer.
class SeqReader {
 public:
  SeqReader(SimDisk& sim, FileId f, u64 offset = 0);
  void read(std::span<std::byte> out);
  template <class T>
  T get() {
    T v;
    read(std::as_writable_bytes(std::span<T, 1>(&v, 1)));
    return v;
  }
  u64 offset() const { return pos_; }

 private:
  SimDisk* sim_;
  FileId f_;
  u64 pos_;
  std::optional<u64> loaded_;
  std::vector<std::byte> buf_;
};

/// Sequential writer with a private one-block buffer; close() flushes the tail.
class SeqWriter {
 public:
  SeqWriter(SimDisk& sim, FileId f, u64 offset = 0);
  ~SeqWriter();
  SeqWriter(const SeqWriter&) = delete;
  SeqWriter& operator=(const SeqWriter&) = delete;

  void write(std::span<const std::byte> in);
  template <class T>
  void put(const T& v) {
    write(std::as_bytes(std::span<const T, 1>(&v, 1)));
  }
  u64 offset() const { return pos_; }
  void close();

 private:
  void spill();
  SimDisk* sim_;
  FileId f_;
  u64 pos_;
  u64 block_;
  std::vector<std::byte> buf_;
  bool open_ = true;
};

/// LIFO of byte records on a simulated file; blocks move through the cache.
class FileStack {
 public:
  FileStack(SimDisk& sim, std::string name);

  void push(std::span<const std::byte> rec);
  std::vector<std::byte> pop(u64 bytes);
  /// Length-prefixed variants (the length trails the payload).
  void push_record(std::span<const std::byte> rec);
  std::vector<std::byte> pop_record();

  u64 size_bytes() const { return top_; }
  bool empty() const { return top_ == 0; }
  u64 bytes_pushed() const { return pushed_; }
  FileId file() const { return f_; }

 private:
  SimDisk* sim_;
  FileId f_;
  u64 top_ = 0;
  u64 pushed_ = 0;
};

/// Host-side append buffer for building fixed-layout records.
class ByteWriter {
 public:
  template <class T>
  void put(const T& v) {
    auto b = std::as_bytes(std::span<const T, 1>(&v, 1));
    bytes.insert(bytes.end(), b.begin(), b.end());
  }
  std::vector<std::byte> bytes;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::byte> b) : b_(b) {}
  template <class T>
  T get() {
    if (pos_ + sizeof(T) > b_.size()) throw IoError("record truncated");
    T v;
    std::memcpy(&v, b_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  u64 remaining() const { return b_.size() - pos_; }

 private:
  std::span<const std::byte> b_;
  u64 pos_ = 0;
};

}  // namespace gridio
