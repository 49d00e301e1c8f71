#include "mfda/io/file_io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mfda {

namespace fs = std::filesystem;

void write_file_atomic(const std::string& path, const std::string& content) {
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("write_file_atomic: cannot open " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write_file_atomic: short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_file: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {
constexpr char kMatrixMagic[8] = {'M', 'F', 'D', 'A', 'B', 'I', 'N', '1'};
}

void write_matrix_binary(const std::string& path, const Eigen::MatrixXd& m) {
    std::string buf;
    const std::int64_t rows = m.rows(), cols = m.cols();
    buf.reserve(sizeof(kMatrixMagic) + 2 * sizeof(std::int64_t) +
                static_cast<std::size_t>(rows * cols) * sizeof(double));
    buf.append(kMatrixMagic, sizeof(kMatrixMagic));
    buf.append(reinterpret_cast<const char*>(&rows), sizeof(rows));
    buf.append(reinterpret_cast<const char*>(&cols), sizeof(cols));
    for (std::int64_t i = 0; i < rows; ++i)
        for (std::int64_t j = 0; j < cols; ++j) {
            double v = m(i, j);
            buf.append(reinterpret_cast<const char*>(&v), sizeof(v));
        }
    write_file_atomic(path, buf);
}

Eigen::MatrixXd read_matrix_binary(const std::string& path) {
    std::string buf = read_file(path);
    if (buf.size() < sizeof(kMatrixMagic) + 2 * sizeof(std::int64_t) ||
        std::memcmp(buf.data(), kMatrixMagic, sizeof(kMatrixMagic)) != 0)
        throw std::runtime_error("read_matrix_binary: bad header in " + path);
    std::int64_t rows, cols;
    std::memcpy(&rows, buf.data() + sizeof(kMatrixMagic), sizeof(rows));
    std::memcpy(&cols, buf.data() + sizeof(kMatrixMagic) + sizeof(rows), sizeof(cols));
    if (rows < 0 || cols < 0 ||
        buf.size() != sizeof(kMatrixMagic) + 2 * sizeof(std::int64_t) +
                          static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) *
                              sizeof(double))
        throw std::runtime_error("read_matrix_binary: truncated data in " + path);
    Eigen::MatrixXd m(rows, cols);
    const char* p = buf.data() + sizeof(kMatrixMagic) + 2 * sizeof(std::int64_t);
    for (std::int64_t i = 0; i < rows; ++i)
        for (std::int64_t j = 0; j < cols; ++j) {
            std::memcpy(&m(i, j), p, sizeof(double));
            p += sizeof(double);
        }
    return m;
}

namespace {

constexpr char kMultiMagic[8] = {'M', 'F', 'D', 'A', 'B', 'I', 'N', 'S'};

void append_matrix(std::string& buf, const Eigen::MatrixXd& m) {
    const std::int64_t rows = m.rows(), cols = m.cols();
    buf.append(reinterpret_cast<const char*>(&rows), sizeof(rows));
    buf.append(reinterpret_cast<const char*>(&cols), sizeof(cols));
    for (std::int64_t i = 0; i < rows; ++i)
        for (std::int64_t j = 0; j < cols; ++j) {
            double v = m(i, j);
            buf.append(reinterpret_cast<const char*>(&v), sizeof(v));
        }
}

}  // namespace

void write_matrices_binary(const std::string& path,
                           const std::vector<Eigen::MatrixXd>& mats) {
    std::string buf;
    buf.append(kMultiMagic, sizeof(kMultiMagic));
    const std::int64_t count = static_cast<std::int64_t>(mats.size());
    buf.append(reinterpret_cast<const char*>(&count), sizeof(count));
    for (const auto& m : mats) append_matrix(buf, m);
    write_file_atomic(path, buf);
}

std::vector<Eigen::MatrixXd> read_matrices_binary(const std::string& path) {
    std::string buf = read_file(path);
    std::size_t pos = 0;
    auto take = [&](void* dst, std::size_t n) {
        if (pos + n > buf.size())
            throw std::runtime_error("read_matrices_binary: truncated data in " + path);
        std::memcpy(dst, buf.data() + pos, n);
        pos += n;
    };
    char magic[8];
    take(magic, sizeof(magic));
    if (std::memcmp(magic, kMultiMagic, sizeof(kMultiMagic)) != 0)
        throw std::runtime_error("read_matrices_binary: bad header in " + path);
    std::int64_t count = 0;
    take(&count, sizeof(count));
    if (count < 0) throw std::runtime_error("read_matrices_binary: bad count in " + path);
    std::vector<Eigen::MatrixXd> mats;
    mats.reserve(static_cast<std::size_t>(count));
    for (std::int64_t k = 0; k < count; ++k) {
        std::int64_t rows = 0, cols = 0;
        take(&rows, sizeof(rows));
        take(&cols, sizeof(cols));
        if (rows < 0 || cols < 0)
            throw std::runtime_error("read_matrices_binary: bad shape in " + path);
        Eigen::MatrixXd m(rows, cols);
        for (std::int64_t i = 0; i < rows; ++i)
            for (std::int64_t j = 0; j < cols; ++j) take(&m(i, j), sizeof(double));
        mats.push_back(std::move(m));
    }
    if (pos != buf.size())
        throw std::runtime_error("read_matrices_binary: trailing bytes in " + path);
    return mats;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a64_hex_of_file(const std::string& path) {
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(read_file(path))));
    return std::string(hex);
}

void ensure_directory(const std::string& path) { fs::create_directories(path); }

}  // namespace mfda
