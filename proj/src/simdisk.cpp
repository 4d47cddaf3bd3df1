#include "gridio/simdisk.hpp"

#include <algorithm>
#include <bit>

namespace gridio {

void SimConfig::validate() const {
  if (block_bytes == 0 || !std::has_single_bit(block_bytes))
    throw std::invalid_argument("block size must be a power of two");
  if (memory_bytes / block_bytes < block_bytes)
    throw std::invalid_argument("tall-cache violation: memory must be at least block^2");
}

SimDisk::SimDisk(SimConfig cfg) : cfg_(cfg) { cfg_.validate(); }

FileId SimDisk::open_file(std::string name) {
  if (by_name_.count(name)) throw IoError("file already exists: " + name);
  u32 id = static_cast<u32>(files_.size());
  by_name_.emplace(name, id);
  files_.push_back(File{std::move(name), {}, std::nullopt, {}});
  return FileId{id};
}

FileId SimDisk::file(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) throw IoError("no such file: " + std::string(name));
  return FileId{it->second};
}

bool SimDisk::exists(std::string_view name) const {
  return by_name_.count(std::string(name)) != 0;
}

std::vector<std::string> SimDisk::file_names() const {
  std::vector<std::string> out;
  for (const auto& f : files_) out.push_back(f.name);
  return out;
}

void SimDisk::count(u32 file, u64 block, Access mode) {
  File& f = files_[file];
  bool seq = !f.last_block || block == *f.last_block + 1;
  f.last_block = block;
  for (IoCounters* c : {&total_, &f.counters}) {
    (mode == Access::read ? c->blocks_read : c->blocks_written)++;
    (seq ? c->sequential_blocks : c->random_blocks)++;
    c->bytes_transferred += cfg_.block_bytes;
  }
}

void SimDisk::touch(FileId f, u64 block, bool fetch, bool dirty) {
  u64 k = key(f, block);
  auto it = where_.find(k);
  if (it != where_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second);
    it->second->dirty = it->second->dirty || dirty;
    return;
  }
  if (fetch) count(f.value, block, Access::read);
  while (lru_.size() >= std::max<u64>(1, cfg_.cache_blocks())) {
    Slot victim = lru_.back();
    lru_.pop_back();
    where_.erase(victim.key);
    if (victim.dirty) count(static_cast<u32>(victim.key >> 40), victim.key & ((u64(1) << 40) - 1), Access::write);
  }
  lru_.push_front(Slot{k, dirty});
  where_[k] = lru_.begin();
}

void SimDisk::ensure_length(File& file, u64 bytes) {
  u64 b = cfg_.block_bytes;
  u64 want = (bytes + b - 1) / b * b;
  if (file.data.size() < want) file.data.resize(want);
}

std::vector<std::byte> SimDisk::access_block(FileId f, u64 block, Access mode,
                                             std::span<const std::byte> payload) {
  File& file = files_.at(f.value);
  u64 b = cfg_.block_bytes;
  if (mode == Access::read) {
    if (block >= file.data.size() / b) throw IoError("read past end of " + file.name);
    touch(f, block, true, false);
  } else {
    if (payload.size() > b) throw IoError("payload larger than a block");
    bool existing = block < file.data.size() / b;
    ensure_length(file, (block + 1) * b);
    std::copy(payload.begin(), payload.end(), file.data.begin() + block * b);
    touch(f, block, existing && payload.size() < b, true);
  }
  auto first = file.data.begin() + block * b;
  return std::vector<std::byte>(first, first + b);
}

void SimDisk::read(FileId f, u64 offset, std::span<std::byte> out) {
  File& file = files_.at(f.value);
  if (offset + out.size() > file.data.size()) throw IoError("read past end of " + file.name);
  u64 b = cfg_.block_bytes;
  u64 pos = 0;
  while (pos < out.size()) {
    u64 at = offset + pos;
    u64 blk = at / b;
    u64 take = std::min<u64>(out.size() - pos, (blk + 1) * b - at);
    touch(f, blk, true, false);
    std::memcpy(out.data() + pos, file.data.data() + at, take);
    pos += take;
  }
}

void SimDisk::write(FileId f, u64 offset, std::span<const std::byte> in) {
  File& file = files_.at(f.value);
  u64 b = cfg_.block_bytes;
  u64 old_blocks = file.data.size() / b;
  ensure_length(file, offset + in.size());
  u64 pos = 0;
  while (pos < in.size()) {
    u64 at = offset + pos;
    u64 blk = at / b;
    u64 take = std::min<u64>(in.size() - pos, (blk + 1) * b - at);
    bool whole = take == b;
    std::memcpy(file.data.data() + at, in.data() + pos, take);
    touch(f, blk, !whole && blk < old_blocks, true);
    pos += take;
  }
}

void SimDisk::stream_read_block(FileId f, u64 block, std::span<std::byte> out) {
  File& file = files_.at(f.value);
  u64 b = cfg_.block_bytes;
  if (block >= file.data.size() / b) throw IoError("read past end of " + file.name);
  count(f.value, block, Access::read);
  std::memcpy(out.data(), file.data.data() + block * b, std::min<u64>(b, out.size()));
}

void SimDisk::stream_write_block(FileId f, u64 block, std::span<const std::byte> in) {
  File& file = files_.at(f.value);
  u64 b = cfg_.block_bytes;
  ensure_length(file, (block + 1) * b);
  std::memcpy(file.data.data() + block * b, in.data(), std::min<u64>(b, in.size()));
  count(f.value, block, Access::write);
  auto it = where_.find(key(f, block));
  if (it != where_.end()) {
    lru_.erase(it->second);
    where_.erase(it);
  }
}

void SimDisk::discard(FileId f, u64 first, u64 last) {
  for (u64 blk = first; blk <= last; ++blk) {
    auto it = where_.find(key(f, blk));
    if (it == where_.end()) continue;
    lru_.erase(it->second);
    where_.erase(it);
  }
}

void SimDisk::truncate(FileId f, u64 bytes) {
  File& file = files_.at(f.value);
  u64 b = cfg_.block_bytes;
  u64 keep = (bytes + b - 1) / b;
  u64 have = file.data.size() / b;
  if (keep >= have) return;
  discard(f, keep, have - 1);
  file.data.resize(keep * b);
}

void SimDisk::flush() {
  std::vector<u64> dirty;
  for (auto& s : lru_)
    if (s.dirty) {
      dirty.push_back(s.key);
      s.dirty = false;
    }
  std::sort(dirty.begin(), dirty.end());
  for (u64 k : dirty) count(static_cast<u32>(k >> 40), k & ((u64(1) << 40) - 1), Access::write);
}

void SimDisk::reset_counters() {
  total_ = {};
  for (auto& f : files_) {
    f.counters = {};
    f.last_block.reset();
  }
}

void SimDisk::set_raw(FileId f, std::vector<std::byte> bytes) {
  File& file = files_.at(f.value);
  discard(f, 0, file.data.size() / cfg_.block_bytes + 1);
  file.data = std::move(bytes);
  ensure_length(file, file.data.size());
}

SeqReader::SeqReader(SimDisk& sim, FileId f, u64 offset)
    : sim_(&sim), f_(f), pos_(offset), buf_(sim.block_bytes()) {}

void SeqReader::read(std::span<std::byte> out) {
  u64 b = sim_->block_bytes();
  u64 done = 0;
  while (done < out.size()) {
    u64 blk = pos_ / b;
    if (loaded_ != blk) {
      sim_->stream_read_block(f_, blk, buf_);
      loaded_ = blk;
    }
    u64 in_blk = pos_ - blk * b;
    u64 take = std::min<u64>(out.size() - done, b - in_blk);
    std::memcpy(out.data() + done, buf_.data() + in_blk, take);
    done += take;
    pos_ += take;
  }
}

SeqWriter::SeqWriter(SimDisk& sim, FileId f, u64 offset)
    : sim_(&sim), f_(f), pos_(offset), block_(offset / sim.block_bytes()), buf_(sim.block_bytes()) {
  u64 b = sim.block_bytes();
  if (offset % b != 0 && block_ < sim.length(f) / b) sim.stream_read_block(f, block_, buf_);
}

SeqWriter::~SeqWriter() {
  try {
    close();
  } catch (...) {
  }
}

void SeqWriter::spill() {
  sim_->stream_write_block(f_, block_, buf_);
  std::fill(buf_.begin(), buf_.end(), std::byte{0});
  ++block_;
}

void SeqWriter::write(std::span<const std::byte> in) {
  if (!open_) throw IoError("write after close");
  u64 b = sim_->block_bytes();
  u64 done = 0;
  while (done < in.size()) {
    u64 in_blk = pos_ - block_ * b;
    u64 take = std::min<u64>(in.size() - done, b - in_blk);
    std::memcpy(buf_.data() + in_blk, in.data() + done, take);
    done += take;
    pos_ += take;
    if (pos_ == (block_ + 1) * b) spill();
  }
}

void SeqWriter::close() {
  if (!open_) return;
  open_ = false;
  if (pos_ > block_ * sim_->block_bytes()) sim_->stream_write_block(f_, block_, buf_);
}

FileStack::FileStack(SimDisk& sim, std::string name) : sim_(&sim), f_(sim.open_file(std::move(name))) {}

void FileStack::push(std::span<const std::byte> rec) {
  sim_->write(f_, top_, rec);
  top_ += rec.size();
  pushed_ += rec.size();
}

std::vector<std::byte> FileStack::pop(u64 bytes) {
  if (bytes > top_) throw IoError("pop on empty stack");
  std::vector<std::byte> out(bytes);
  u64 old_top = top_;
  top_ -= bytes;
  if (bytes) sim_->read(f_, top_, out);
  u64 b = sim_->block_bytes();
  // blocks wholly above the new top are dead
  u64 first_dead = (top_ + b - 1) / b;
  u64 last = old_top == 0 ? 0 : (old_top - 1) / b;
  if (old_top > 0 && first_dead <= last) sim_->discard(f_, first_dead, last);
  sim_->truncate(f_, top_);
  return out;
}

void FileStack::push_record(std::span<const std::byte> rec) {
  push(rec);
  u64 len = rec.size();
  push(std::as_bytes(std::span<const u64, 1>(&len, 1)));
}

std::vector<std::byte> FileStack::pop_record() {
  auto lb = pop(sizeof(u64));
  u64 len;
  std::memcpy(&len, lb.data(), sizeof len);
  return pop(len);
}

}  // namespace gridio
