#pragma once

#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "stylelab/tensor.hpp"

namespace stylelab::binio {

// Little-endian primitives; doubles as raw IEEE-754 bits so round-trips
// are exact.

inline void write_u32(std::ostream& os, uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw InputError("binio: truncated stream");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
    return v;
}

inline void write_i64(std::ostream& os, int64_t v) {
    uint64_t u = static_cast<uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

inline int64_t read_i64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw InputError("binio: truncated stream");
    uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<uint64_t>(b[i]) << (8 * i);
    return static_cast<int64_t>(u);
}

inline void write_f64(std::ostream& os, double v) {
    uint64_t u;
    std::memcpy(&u, &v, 8);
    write_i64(os, static_cast<int64_t>(u));
}

inline double read_f64(std::istream& is) {
    uint64_t u = static_cast<uint64_t>(read_i64(is));
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

inline void write_str(std::ostream& os, const std::string& s) {
    write_u32(os, static_cast<uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_str(std::istream& is) {
    uint32_t n = read_u32(is);
    std::string s(n, '\0');
    is.read(s.data(), n);
    if (!is) throw InputError("binio: truncated stream");
    return s;
}

inline void write_tensor(std::ostream& os, const Tensor& t) {
    write_u32(os, static_cast<uint32_t>(t.rank()));
    for (int d = 0; d < t.rank(); ++d) write_i64(os, t.dim(d));
    for (int64_t i = 0; i < t.numel(); ++i) write_f64(os, static_cast<double>(t.at(i)));
}

inline Tensor read_tensor(std::istream& is) {
    uint32_t rank = read_u32(is);
    std::vector<int> shape;
    for (uint32_t d = 0; d < rank; ++d) shape.push_back(static_cast<int>(read_i64(is)));
    Tensor t(shape);
    for (int64_t i = 0; i < t.numel(); ++i) t.at(i) = static_cast<real>(read_f64(is));
    return t;
}

}  // namespace stylelab::binio
