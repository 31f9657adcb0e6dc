#include "genrecon/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>

#include "genrecon/error.hpp"

namespace genrecon {

namespace {

struct MemoryReader {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t offset;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t count) {
  auto* src = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (src->size - src->offset < count) png_error(png, "unexpected end of PNG data");
  std::memcpy(out, src->data + src->offset, count);
  src->offset += count;
}

void append_to_vector(png_structp png, png_bytep in, png_size_t count) {
  auto* dst = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  dst->insert(dst->end(), in, in + count);
}

void flush_noop(png_structp) {}

void record_error(png_structp png, png_const_charp msg) {
  auto* slot = static_cast<char*>(png_get_error_ptr(png));
  std::strncpy(slot, msg, 255);
  slot[255] = '\0';
  png_longjmp(png, 1);
}

void ignore_warning(png_structp, png_const_charp) {}

struct PngHeader {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
  int channels = 0;  // after transforms
  png_size_t rowbytes = 0;
};

// libpng reports errors via longjmp. These helpers keep only trivially
// destructible locals so that the jump never skips a destructor.
bool read_header(png_structp png, png_infop info, PngHeader* hdr) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_info(png, info);
  hdr->width = png_get_image_width(png, info);
  hdr->height = png_get_image_height(png, info);
  hdr->bit_depth = png_get_bit_depth(png, info);
  hdr->color_type = png_get_color_type(png, info);
  return true;
}

bool configure_and_update(png_structp png, png_infop info, PngHeader* hdr) {
  if (setjmp(png_jmpbuf(png))) return false;
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (hdr->color_type == PNG_COLOR_TYPE_GRAY || hdr->color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  hdr->channels = png_get_channels(png, info);
  hdr->rowbytes = png_get_rowbytes(png, info);
  return true;
}

bool read_rows(png_structp png, png_infop info, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_read_image(png, rows);
  png_read_end(png, info);
  return true;
}

bool write_all(png_structp png, png_infop info, const PngHeader* hdr, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_IHDR(png, info, hdr->width, hdr->height, 8,
               hdr->channels == 4 ? PNG_COLOR_TYPE_RGBA : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, info);
  return true;
}

class ReadHandle {
 public:
  explicit ReadHandle(char* error_slot) {
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, error_slot, record_error, ignore_warning);
    if (png_) info_ = png_create_info_struct(png_);
  }
  ~ReadHandle() { png_destroy_read_struct(&png_, info_ ? &info_ : nullptr, nullptr); }
  ReadHandle(const ReadHandle&) = delete;
  ReadHandle& operator=(const ReadHandle&) = delete;
  png_structp png() const { return png_; }
  png_infop info() const { return info_; }

 private:
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

class WriteHandle {
 public:
  explicit WriteHandle(char* error_slot) {
    png_ = png_create_write_struct(PNG_LIBPNG_VER_STRING, error_slot, record_error, ignore_warning);
    if (png_) info_ = png_create_info_struct(png_);
  }
  ~WriteHandle() { png_destroy_write_struct(&png_, info_ ? &info_ : nullptr); }
  WriteHandle(const WriteHandle&) = delete;
  WriteHandle& operator=(const WriteHandle&) = delete;
  png_structp png() const { return png_; }
  png_infop info() const { return info_; }

 private:
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

}  // namespace

Image decode_png(std::span<const std::uint8_t> bytes, const std::string& name) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw Error(ErrorCode::malformed_png, name + ": not a PNG stream");
  }
  char error_slot[256] = {};
  ReadHandle handle(error_slot);
  if (!handle.png() || !handle.info()) {
    throw Error(ErrorCode::io_error, name + ": libpng allocation failed");
  }
  MemoryReader reader{bytes.data(), bytes.size(), 0};
  png_set_read_fn(handle.png(), &reader, read_from_memory);

  PngHeader hdr;
  if (!read_header(handle.png(), handle.info(), &hdr)) {
    throw Error(ErrorCode::malformed_png, name + ": " + error_slot);
  }
  if (hdr.color_type == PNG_COLOR_TYPE_PALETTE) {
    throw Error(ErrorCode::unsupported_png, name + ": palette PNGs are not supported");
  }
  if (hdr.bit_depth != 8 && hdr.bit_depth != 16) {
    throw Error(ErrorCode::unsupported_png,
                name + ": unsupported bit depth " + std::to_string(hdr.bit_depth));
  }
  if (!configure_and_update(handle.png(), handle.info(), &hdr)) {
    throw Error(ErrorCode::malformed_png, name + ": " + error_slot);
  }
  if (hdr.channels != 3 && hdr.channels != 4) {
    throw Error(ErrorCode::unsupported_png,
                name + ": unexpected channel count " + std::to_string(hdr.channels));
  }

  std::vector<png_byte> raw(hdr.rowbytes * hdr.height);
  std::vector<png_bytep> rows(hdr.height);
  for (png_uint_32 y = 0; y < hdr.height; ++y) rows[y] = raw.data() + y * hdr.rowbytes;
  if (!read_rows(handle.png(), handle.info(), rows.data())) {
    throw Error(ErrorCode::malformed_png, name + ": " + error_slot);
  }

  const auto w = static_cast<int>(hdr.width);
  const auto h = static_cast<int>(hdr.height);
  const std::size_t samples = static_cast<std::size_t>(w) * h * hdr.channels;
  std::vector<float> data(samples);
  if (hdr.bit_depth == 8) {
    for (std::size_t i = 0; i < samples; ++i) data[i] = raw[i] / 255.0f;
  } else {
    // 16-bit samples are stored big-endian in the row buffer.
    for (std::size_t i = 0; i < samples; ++i) {
      const unsigned v = (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
      data[i] = static_cast<float>(v / 65535.0);
    }
  }
  return Image(w, h, hdr.channels, std::move(data));
}

Image load_png(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::missing_file, path.string() + ": no such file");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, path.string() + ": cannot open for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_png(bytes, path.string());
}

std::vector<std::uint8_t> encode_png(const Image& img) {
  if (img.empty()) throw_invalid("cannot encode an empty image");
  const int w = img.width();
  const int h = img.height();
  const int ch = img.channels();
  std::vector<png_byte> raw(static_cast<std::size_t>(w) * h * ch);
  const auto src = img.data();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = static_cast<png_byte>(std::lround(std::clamp(src[i], 0.0f, 1.0f) * 255.0f));
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y) rows[static_cast<std::size_t>(y)] = raw.data() + static_cast<std::size_t>(y) * w * ch;

  char error_slot[256] = {};
  WriteHandle handle(error_slot);
  if (!handle.png() || !handle.info()) throw Error(ErrorCode::io_error, "libpng allocation failed");
  std::vector<std::uint8_t> bytes;
  png_set_write_fn(handle.png(), &bytes, append_to_vector, flush_noop);
  PngHeader hdr;
  hdr.width = static_cast<png_uint_32>(w);
  hdr.height = static_cast<png_uint_32>(h);
  hdr.channels = ch;
  if (!write_all(handle.png(), handle.info(), &hdr, rows.data())) {
    throw Error(ErrorCode::io_error, std::string("PNG encoding failed: ") + error_slot);
  }
  return bytes;
}

void save_png(const Image& img, const std::filesystem::path& path) {
  const auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw Error(ErrorCode::io_error, path.string() + ": write failed");
}

}  // namespace genrecon
