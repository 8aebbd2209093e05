#include "hypgan/data.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <fstream>

namespace hypgan {

namespace {

constexpr std::uint32_t kImageMagic = 2051;
constexpr std::uint32_t kLabelMagic = 2049;

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return bytes;
}

std::vector<unsigned char> gunzip(const std::vector<unsigned char>& in, const std::string& path) {
    z_stream strm{};
    if (inflateInit2(&strm, 15 + 32) != Z_OK) {  // auto-detect gzip/zlib header
        throw DataError("zlib init failed for '" + path + "'");
    }
    std::vector<unsigned char> out;
    out.reserve(in.size() * 4);
    unsigned char buf[1 << 16];
    strm.next_in = const_cast<unsigned char*>(in.data());
    strm.avail_in = static_cast<uInt>(in.size());
    int rc = Z_OK;
    do {
        strm.next_out = buf;
        strm.avail_out = sizeof(buf);
        rc = inflate(&strm, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&strm);
            throw DataError("gzip decompression failed for '" + path + "'");
        }
        out.insert(out.end(), buf, buf + (sizeof(buf) - strm.avail_out));
    } while (rc != Z_STREAM_END);
    inflateEnd(&strm);
    return out;
}

std::vector<unsigned char> read_maybe_gz(const std::string& path) {
    std::vector<unsigned char> bytes = read_file(path);
    if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b) {
        return gunzip(bytes, path);
    }
    return bytes;
}

std::uint32_t read_u32_be(const std::vector<unsigned char>& b, std::size_t off,
                          const std::string& path) {
    if (off + 4 > b.size()) {
        throw DataError("truncated file '" + path + "'");
    }
    return (static_cast<std::uint32_t>(b[off]) << 24) |
           (static_cast<std::uint32_t>(b[off + 1]) << 16) |
           (static_cast<std::uint32_t>(b[off + 2]) << 8) | static_cast<std::uint32_t>(b[off + 3]);
}

void write_u32_be(std::ofstream& out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path) {
    const std::vector<unsigned char> img = read_maybe_gz(images_path);
    const std::vector<unsigned char> lab = read_maybe_gz(labels_path);

    if (read_u32_be(img, 0, images_path) != kImageMagic) {
        throw DataError("bad image magic in '" + images_path + "' (expected 2051)");
    }
    const std::uint32_t n_images = read_u32_be(img, 4, images_path);
    const std::uint32_t rows = read_u32_be(img, 8, images_path);
    const std::uint32_t cols = read_u32_be(img, 12, images_path);
    if (rows != 28 || cols != 28) {
        throw DataError("unexpected image size " + std::to_string(rows) + "x" +
                        std::to_string(cols) + " in '" + images_path + "'");
    }
    const std::size_t pixels = static_cast<std::size_t>(n_images) * 784;
    if (img.size() != 16 + pixels) {
        throw DataError("truncated image file '" + images_path + "'");
    }

    if (read_u32_be(lab, 0, labels_path) != kLabelMagic) {
        throw DataError("bad label magic in '" + labels_path + "' (expected 2049)");
    }
    const std::uint32_t n_labels = read_u32_be(lab, 4, labels_path);
    if (lab.size() != 8 + n_labels) {
        throw DataError("truncated label file '" + labels_path + "'");
    }
    if (n_images != n_labels) {
        throw DataError("image/label count mismatch: " + std::to_string(n_images) + " vs " +
                        std::to_string(n_labels));
    }

    Dataset ds;
    ds.images = Tensor(static_cast<std::int64_t>(n_images), 784);
    for (std::size_t i = 0; i < pixels; ++i) {
        ds.images[static_cast<std::int64_t>(i)] = static_cast<double>(img[16 + i]) / 127.5 - 1.0;
    }
    ds.labels.resize(n_labels);
    for (std::uint32_t i = 0; i < n_labels; ++i) {
        const unsigned char v = lab[8 + i];
        if (v > 9) {
            throw DataError("label " + std::to_string(v) + " out of range in '" + labels_path +
                            "'");
        }
        ds.labels[i] = v;
    }
    return ds;
}

void save_mnist_idx(const Dataset& ds, const std::string& images_path,
                    const std::string& labels_path) {
    std::ofstream img(images_path, std::ios::binary);
    std::ofstream lab(labels_path, std::ios::binary);
    if (!img || !lab) {
        throw DataError("cannot open output files for writing");
    }
    const std::uint32_t n = static_cast<std::uint32_t>(ds.size());
    write_u32_be(img, kImageMagic);
    write_u32_be(img, n);
    write_u32_be(img, 28);
    write_u32_be(img, 28);
    for (std::int64_t i = 0; i < ds.images.numel(); ++i) {
        const long v = std::lround((ds.images[i] + 1.0) * 127.5);
        const unsigned char b = static_cast<unsigned char>(v < 0 ? 0 : (v > 255 ? 255 : v));
        img.write(reinterpret_cast<const char*>(&b), 1);
    }
    write_u32_be(lab, kLabelMagic);
    write_u32_be(lab, n);
    for (int l : ds.labels) {
        const unsigned char b = static_cast<unsigned char>(l);
        lab.write(reinterpret_cast<const char*>(&b), 1);
    }
}

Dataset take_subset(const Dataset& ds, std::int64_t n) {
    if (n <= 0 || n >= ds.size()) {
        return ds;
    }
    Dataset out;
    out.images = Tensor(n, ds.images.cols());
    for (std::int64_t i = 0; i < n * ds.images.cols(); ++i) {
        out.images[i] = ds.images[i];
    }
    out.labels.assign(ds.labels.begin(), ds.labels.begin() + n);
    return out;
}

Tensor one_hot(const std::vector<int>& labels, int num_classes) {
    Tensor out(static_cast<std::int64_t>(labels.size()), num_classes, 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= num_classes) {
            throw DataError("label out of range for one-hot encoding");
        }
        out.at(static_cast<std::int64_t>(i), labels[i]) = 1.0;
    }
    return out;
}

Tensor sample_noise(std::int64_t batch, std::int64_t dim, RngState& rng) {
    if (batch < 1 || dim < 1) {
        throw DataError("sample_noise: batch and dim must be >= 1");
    }
    Tensor out(batch, dim);
    rng.fill_gaussian(out.data(), static_cast<std::size_t>(out.numel()));
    return out;
}

std::vector<std::vector<std::int64_t>> epoch_batches(std::int64_t n, std::int64_t batch_size,
                                                     RngState& rng) {
    if (batch_size < 1) {
        throw DataError("batch size must be >= 1");
    }
    std::vector<std::int64_t> perm(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        perm[static_cast<std::size_t>(i)] = i;
    }
    // Fisher-Yates with the counter-based stream.
    for (std::int64_t i = n - 1; i > 0; --i) {
        const std::int64_t j =
            static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(i + 1)));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    std::vector<std::vector<std::int64_t>> batches;
    for (std::int64_t start = 0; start < n; start += batch_size) {
        const std::int64_t end = start + batch_size < n ? start + batch_size : n;
        batches.emplace_back(perm.begin() + start, perm.begin() + end);
    }
    return batches;
}

Batch gather(const Dataset& ds, const std::vector<std::int64_t>& indices) {
    Batch b;
    const std::int64_t cols = ds.images.cols();
    b.images = Tensor(static_cast<std::int64_t>(indices.size()), cols);
    b.labels.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const std::int64_t src = indices[i];
        for (std::int64_t j = 0; j < cols; ++j) {
            b.images.at(static_cast<std::int64_t>(i), j) = ds.images.at(src, j);
        }
        b.labels.push_back(ds.labels[static_cast<std::size_t>(src)]);
    }
    b.labels_one_hot = one_hot(b.labels);
    return b;
}

}  // namespace hypgan
