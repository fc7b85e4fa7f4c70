#include "ppnn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "ppnn/io_util.hpp"

namespace ppnn {

namespace {
constexpr char kMagic[4] = {'P', 'P', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void save_checkpoint(const Model& model, const std::string& path) {
  std::ostringstream os(std::ios::binary);
  os.write(kMagic, 4);
  write_u32(os, kVersion);
  write_u64(os, model.config().fingerprint());
  const auto& params = model.weights().params;
  write_u32(os, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    if (p->name.size() > 0xffff) throw IoError("tensor name too long");
    write_u16(os, static_cast<std::uint16_t>(p->name.size()));
    os.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    os.put(static_cast<char>(p->shape.size()));
    for (int d : p->shape) write_u32(os, static_cast<std::uint32_t>(d));
    write_f32_array(os, p->value.data(), p->value.size());
  }
  atomic_write_file(path, os.str());
}

namespace {
std::uint64_t read_header(std::istream& is, const std::string& path) {
  char magic[4] = {};
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("bad magic: not a checkpoint file: " + path);
  }
  const std::uint32_t version = read_u32(is);
  if (version != kVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  }
  return read_u64(is);
}
}  // namespace

std::uint64_t peek_checkpoint_fingerprint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  return read_header(is, path);
}

void load_checkpoint(Model& model, const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  const std::uint64_t fp = read_header(is, path);
  if (fp != model.config().fingerprint()) {
    throw IoError("checkpoint fingerprint does not match the model configuration");
  }
  const std::uint32_t count = read_u32(is);
  auto& params = model.weights().params;
  if (count != params.size()) {
    throw IoError("checkpoint tensor count mismatch");
  }
  for (auto& p : params) {
    const std::uint16_t len = read_u16(is);
    std::string name(len, '\0');
    is.read(name.data(), len);
    if (!is) throw IoError("truncated file");
    if (name != p->name) throw IoError("checkpoint tensor '" + name + "' unexpected; wanted '" + p->name + "'");
    const int ndim = is.get();
    if (ndim != static_cast<int>(p->shape.size())) {
      throw IoError("checkpoint tensor rank mismatch for " + name);
    }
    for (int d : p->shape) {
      if (read_u32(is) != static_cast<std::uint32_t>(d)) {
        throw IoError("checkpoint tensor shape mismatch for " + name);
      }
    }
    read_f32_array(is, p->value.data(), p->value.size());
  }
}

}  // namespace ppnn
