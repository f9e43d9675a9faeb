#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "tryon/tensor.hpp"

namespace tryon {

// Raw tensor file format, used by the CLI for all intermediate tensors:
//   magic "TTF1", little-endian u32 rank, u32 extent per dimension,
//   then the payload as f32, row-major.
namespace ttf {

inline void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw IoError("tensor file: truncated header");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace ttf

template <typename Scalar>
void save_tensor(const Tensor<Scalar>& t, std::ostream& os) {
    os.write("TTF1", 4);
    ttf::write_u32(os, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t e : t.shape()) ttf::write_u32(os, static_cast<std::uint32_t>(e));
    std::vector<float> payload(t.numel());
    for (std::size_t i = 0; i < t.numel(); ++i) payload[i] = static_cast<float>(t[i]);
    os.write(reinterpret_cast<const char*>(payload.data()),
             static_cast<std::streamsize>(payload.size() * sizeof(float)));
    if (!os) throw IoError("tensor file: write failed");
}

template <typename Scalar>
Tensor<Scalar> load_tensor(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "TTF1", 4) != 0) throw IoError("tensor file: bad magic");
    std::uint32_t rank = ttf::read_u32(is);
    if (rank == 0 || rank > 8) throw IoError("tensor file: unreasonable rank");
    std::vector<std::size_t> shape(rank);
    for (auto& e : shape) {
        e = ttf::read_u32(is);
        if (e == 0) throw IoError("tensor file: zero extent");
    }
    Tensor<Scalar> t(shape);
    std::vector<float> payload(t.numel());
    is.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(float)));
    if (!is) throw IoError("tensor file: truncated payload");
    for (std::size_t i = 0; i < t.numel(); ++i) t[i] = static_cast<Scalar>(payload[i]);
    return t;
}

// Atomic file write: stage to <path>.tmp, then rename over the target.
template <typename WriteFn>
void write_file_atomic(const std::filesystem::path& path, WriteFn&& fn) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw IoError("cannot open for writing: " + tmp.string());
        fn(os);
        if (!os) throw IoError("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

template <typename Scalar>
void save_tensor_file(const Tensor<Scalar>& t, const std::filesystem::path& path) {
    write_file_atomic(path, [&](std::ostream& os) { save_tensor(t, os); });
}

template <typename Scalar>
Tensor<Scalar> load_tensor_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open tensor file: " + path.string());
    return load_tensor<Scalar>(is);
}

}  // namespace tryon
