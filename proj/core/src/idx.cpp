#include <array>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include <zlib.h>

#include "specapprox/datasets.hpp"
#include "specapprox/errors.hpp"

namespace specapprox {

namespace {

using Bytes = std::vector<std::uint8_t>;

Bytes read_plain(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return data;
}

Bytes inflate_gzip(const Bytes& compressed, const std::filesystem::path& path) {
  z_stream stream{};
  if (inflateInit2(&stream, 16 + MAX_WBITS) != Z_OK) throw IoError("zlib init failed");
  stream.next_in = const_cast<Bytef*>(compressed.data());
  stream.avail_in = static_cast<uInt>(compressed.size());

  Bytes out;
  std::array<std::uint8_t, 1 << 16> chunk{};
  int status = Z_OK;
  while (status != Z_STREAM_END) {
    stream.next_out = chunk.data();
    stream.avail_out = static_cast<uInt>(chunk.size());
    status = inflate(&stream, Z_NO_FLUSH);
    if (status != Z_OK && status != Z_STREAM_END) {
      inflateEnd(&stream);
      throw IoError("corrupt or truncated gzip stream in " + path.string());
    }
    out.insert(out.end(), chunk.data(), chunk.data() + (chunk.size() - stream.avail_out));
    if (status == Z_OK && stream.avail_in == 0 && stream.avail_out != 0) {
      inflateEnd(&stream);
      throw IoError("truncated gzip stream in " + path.string());
    }
  }
  inflateEnd(&stream);
  return out;
}

Bytes read_maybe_gzip(const std::filesystem::path& path) {
  Bytes raw = read_plain(path);
  if (raw.size() >= 2 && raw[0] == 0x1f && raw[1] == 0x8b) return inflate_gzip(raw, path);
  return raw;
}

std::uint32_t read_be32(const Bytes& data, std::size_t offset, const std::filesystem::path& path) {
  if (data.size() < offset + 4) throw IoError("truncated IDX header in " + path.string());
  return (std::uint32_t{data[offset]} << 24) | (std::uint32_t{data[offset + 1]} << 16) |
         (std::uint32_t{data[offset + 2]} << 8) | std::uint32_t{data[offset + 3]};
}

void check_magic(std::uint32_t observed, std::uint32_t expected, const std::filesystem::path& path) {
  if (observed != expected) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "bad IDX magic 0x%08X (expected 0x%08X) in ", observed, expected);
    throw FormatError(buf + path.string());
  }
}

void put_be32(Bytes& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void write_bytes(const std::filesystem::path& path, const Bytes& data, bool gzip) {
  if (gzip) {
    gzFile f = gzopen(path.string().c_str(), "wb");
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    const int written = data.empty() ? 0 : gzwrite(f, data.data(), static_cast<unsigned>(data.size()));
    const int closed = gzclose(f);
    if (written != static_cast<int>(data.size()) || closed != Z_OK) {
      throw IoError("write failed: " + path.string());
    }
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

IdxImages read_idx_images(const std::filesystem::path& path) {
  const Bytes data = read_maybe_gzip(path);
  check_magic(read_be32(data, 0, path), kIdxImagesMagic, path);
  const std::uint32_t count = read_be32(data, 4, path);
  IdxImages images;
  images.rows = read_be32(data, 8, path);
  images.cols = read_be32(data, 12, path);
  const std::size_t expected = std::size_t{count} * images.rows * images.cols;
  if (data.size() - 16 < expected) {
    throw IoError("truncated IDX image file " + path.string() + ": header promises " +
                  std::to_string(expected) + " pixel bytes, found " + std::to_string(data.size() - 16));
  }
  images.pixels.assign(data.begin() + 16, data.begin() + 16 + static_cast<std::ptrdiff_t>(expected));
  return images;
}

std::vector<std::uint8_t> read_idx_labels(const std::filesystem::path& path) {
  const Bytes data = read_maybe_gzip(path);
  check_magic(read_be32(data, 0, path), kIdxLabelsMagic, path);
  const std::uint32_t count = read_be32(data, 4, path);
  if (data.size() - 8 < count) {
    throw IoError("truncated IDX label file " + path.string() + ": header promises " +
                  std::to_string(count) + " labels, found " + std::to_string(data.size() - 8));
  }
  return {data.begin() + 8, data.begin() + 8 + count};
}

void write_idx_images(const std::filesystem::path& path, const IdxImages& images, bool gzip) {
  const std::size_t per = std::size_t{images.rows} * images.cols;
  if (per == 0 || images.pixels.size() % per != 0) {
    throw InputError("write_idx_images: pixel buffer is not a whole number of images");
  }
  Bytes out;
  out.reserve(16 + images.pixels.size());
  put_be32(out, kIdxImagesMagic);
  put_be32(out, static_cast<std::uint32_t>(images.pixels.size() / per));
  put_be32(out, images.rows);
  put_be32(out, images.cols);
  out.insert(out.end(), images.pixels.begin(), images.pixels.end());
  write_bytes(path, out, gzip);
}

void write_idx_labels(const std::filesystem::path& path, const std::vector<std::uint8_t>& labels, bool gzip) {
  Bytes out;
  out.reserve(8 + labels.size());
  put_be32(out, kIdxLabelsMagic);
  put_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  write_bytes(path, out, gzip);
}

PointCloud load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path,
                    bool rescale) {
  const IdxImages images = read_idx_images(images_path);
  const auto labels = read_idx_labels(labels_path);
  if (images.count() != labels.size()) {
    throw ConsistencyError("IDX count mismatch: " + std::to_string(images.count()) + " images in " +
                           images_path.string() + " but " + std::to_string(labels.size()) +
                           " labels in " + labels_path.string());
  }
  const auto n = static_cast<Eigen::Index>(images.count());
  const auto d = static_cast<Eigen::Index>(images.rows) * images.cols;
  const double divisor = rescale ? 255.0 : 1.0;

  PointCloud cloud;
  cloud.points.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::uint8_t* row = images.pixels.data() + static_cast<std::size_t>(i * d);
    for (Eigen::Index j = 0; j < d; ++j) cloud.points(i, j) = static_cast<double>(row[j]) / divisor;
  }
  cloud.labels.emplace(labels.begin(), labels.end());
  return cloud;
}

}  // namespace specapprox
