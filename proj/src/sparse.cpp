#include "tdlg/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "tdlg/kernels.hpp"
#include "tdlg/parallel.hpp"

namespace tdlg {

double SparseMatrix::at(std::int64_t r, std::int64_t c) const {
    const auto cs = row_cols(r);
    const auto it = std::lower_bound(cs.begin(), cs.end(), static_cast<std::int32_t>(c));
    if (it == cs.end() || *it != c) return 0.0;
    return val[row_ptr[r] + (it - cs.begin())];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (static_cast<std::int64_t>(x.size()) != cols || static_cast<std::int64_t>(y.size()) != rows)
        throw std::invalid_argument("multiply: dimension mismatch");
    parallel_for(static_cast<std::size_t>(rows), [&](std::size_t b, std::size_t e) {
        kern::csr_spmv(row_ptr.data(), col.data(), val.data(), b, e, x.data(), y.data());
    });
}

std::vector<double> SparseMatrix::row_sums() const {
    std::vector<double> s(static_cast<std::size_t>(rows), 0.0);
    for (std::int64_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += val[k];
        s[r] = acc;
    }
    return s;
}

bool SparseMatrix::structurally_equal(const SparseMatrix& other) const {
    return rows == other.rows && cols == other.cols && row_ptr == other.row_ptr &&
           col == other.col;
}

SparseMatrix normalize(const SparseMatrix& a, Normalization scheme) {
    if (scheme == Normalization::none) return a;
    const auto d = a.row_sums();
    for (std::int64_t r = 0; r < a.rows; ++r)
        if (!(d[r] > 0.0))
            throw std::runtime_error("normalize: row " + std::to_string(r) +
                                     " has nonpositive sum");

    SparseMatrix out = a;
    if (scheme == Normalization::spectral) {
        std::vector<double> dinvsqrt(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) dinvsqrt[i] = 1.0 / std::sqrt(d[i]);
        parallel_for(static_cast<std::size_t>(a.rows), [&](std::size_t b, std::size_t e) {
            for (std::size_t r = b; r < e; ++r)
                for (std::int64_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
                    out.val[k] = a.val[k] * dinvsqrt[r] * dinvsqrt[a.col[k]];
        });
    } else {
        std::vector<double> dinv(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) dinv[i] = 1.0 / d[i];
        parallel_for(static_cast<std::size_t>(a.rows), [&](std::size_t b, std::size_t e) {
            for (std::size_t r = b; r < e; ++r)
                for (std::int64_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
                    out.val[k] = 0.5 * a.val[k] * (dinv[r] + dinv[a.col[k]]);
        });
    }
    return out;
}

void write_coordinate_text(const SparseMatrix& a, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out.precision(17);
    for (std::int64_t r = 0; r < a.rows; ++r)
        for (std::int64_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
            out << r << ' ' << a.col[k] << ' ' << a.val[k] << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {
constexpr char kCsrMagic[8] = {'T', 'D', 'L', 'G', 'C', 'S', 'R', '1'};
}

void write_csr_binary(const SparseMatrix& a, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out.write(kCsrMagic, sizeof(kCsrMagic));
    const std::int64_t dims[3] = {a.rows, a.cols, a.nnz()};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    out.write(reinterpret_cast<const char*>(a.row_ptr.data()),
              static_cast<std::streamsize>(a.row_ptr.size() * sizeof(std::int64_t)));
    std::vector<std::int64_t> wide(a.col.begin(), a.col.end());
    out.write(reinterpret_cast<const char*>(wide.data()),
              static_cast<std::streamsize>(wide.size() * sizeof(std::int64_t)));
    out.write(reinterpret_cast<const char*>(a.val.data()),
              static_cast<std::streamsize>(a.val.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + path);
}

SparseMatrix read_csr_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCsrMagic, sizeof(magic)) != 0)
        throw std::runtime_error(path + ": not a TDLG CSR file");
    std::int64_t dims[3];
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!in || dims[0] < 0 || dims[1] < 0 || dims[2] < 0)
        throw std::runtime_error(path + ": corrupt CSR header");
    SparseMatrix a;
    a.rows = dims[0];
    a.cols = dims[1];
    a.row_ptr.resize(static_cast<std::size_t>(a.rows) + 1);
    in.read(reinterpret_cast<char*>(a.row_ptr.data()),
            static_cast<std::streamsize>(a.row_ptr.size() * sizeof(std::int64_t)));
    std::vector<std::int64_t> wide(static_cast<std::size_t>(dims[2]));
    in.read(reinterpret_cast<char*>(wide.data()),
            static_cast<std::streamsize>(wide.size() * sizeof(std::int64_t)));
    a.col.assign(wide.begin(), wide.end());
    a.val.resize(static_cast<std::size_t>(dims[2]));
    in.read(reinterpret_cast<char*>(a.val.data()),
            static_cast<std::streamsize>(a.val.size() * sizeof(double)));
    if (!in) throw std::runtime_error(path + ": truncated CSR file");
    return a;
}

}  // namespace tdlg
