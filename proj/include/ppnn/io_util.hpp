#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ppnn {

// Little-endian primitives for the binary containers.
void write_u16(std::ostream& os, std::uint16_t v);
void write_u32(std::ostream& os, std::uint32_t v);
void write_u64(std::ostream& os, std::uint64_t v);
void write_f32(std::ostream& os, float v);
void write_f64(std::ostream& os, double v);
void write_f32_array(std::ostream& os, const float* p, std::size_t n);

std::uint16_t read_u16(std::istream& is);
std::uint32_t read_u32(std::istream& is);
std::uint64_t read_u64(std::istream& is);
float read_f32(std::istream& is);
double read_f64(std::istream& is);
void read_f32_array(std::istream& is, float* p, std::size_t n);

// Writes via a temp file in the same directory, then renames into place, so
// readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& contents);
void atomic_write_file(const std::string& path,
                       const std::vector<char>& contents);

std::string read_text_file(const std::string& path);

// 64-bit FNV-1a, used for config fingerprints and output hashing.
std::uint64_t fnv1a64(const void* data, std::size_t n,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64(const std::string& s, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace ppnn
