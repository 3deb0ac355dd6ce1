#include "mura/raster_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include <json.hpp>

#include "mura/errors.hpp"

namespace fs = std::filesystem;

namespace mura {

namespace {

std::string lower_ext(const std::string& path) {
  std::string e = fs::path(path).extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open \"" + path + "\"");
  std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
  return data;
}

void write_file(const std::string& path, const std::vector<uint8_t>& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write \"" + path + "\"");
  out.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
  if (!out) throw IoError("short write to \"" + path + "\"");
}

// ---- raw sample codecs (always little-endian on disk) ----

void encode_samples(const Band& b, std::vector<uint8_t>& out) {
  const std::size_t n = std::size_t(b.width()) * b.height();
  switch (b.sample_type()) {
    case SampleType::u8:
      out.reserve(out.size() + n);
      for (float v : b.samples())
        out.push_back(uint8_t(std::clamp(std::lround(double(v)), 0L, 255L)));
      break;
    case SampleType::u16:
      out.reserve(out.size() + n * 2);
      for (float v : b.samples()) {
        const uint16_t s = uint16_t(std::clamp(std::lround(double(v)), 0L, 65535L));
        out.push_back(uint8_t(s & 0xff));
        out.push_back(uint8_t(s >> 8));
      }
      break;
    case SampleType::f32:
      out.reserve(out.size() + n * 4);
      for (float v : b.samples()) {
        uint32_t bits;
        std::memcpy(&bits, &v, 4);
        out.push_back(uint8_t(bits & 0xff));
        out.push_back(uint8_t((bits >> 8) & 0xff));
        out.push_back(uint8_t((bits >> 16) & 0xff));
        out.push_back(uint8_t((bits >> 24) & 0xff));
      }
      break;
  }
}

float decode_sample(const uint8_t* p, SampleType t, bool swap) {
  switch (t) {
    case SampleType::u8:
      return float(p[0]);
    case SampleType::u16: {
      const uint16_t v = swap ? uint16_t(p[0] << 8 | p[1]) : uint16_t(p[1] << 8 | p[0]);
      return float(v);
    }
    case SampleType::f32: {
      uint32_t bits = swap ? (uint32_t(p[0]) << 24 | uint32_t(p[1]) << 16 | uint32_t(p[2]) << 8 |
                              uint32_t(p[3]))
                           : (uint32_t(p[3]) << 24 | uint32_t(p[2]) << 16 | uint32_t(p[1]) << 8 |
                              uint32_t(p[0]));
      float f;
      std::memcpy(&f, &bits, 4);
      return f;
    }
  }
  return 0.0f;
}

// ---- sidecar JSON + raw ----

nlohmann::ordered_json nodata_to_json(std::optional<double> nd) {
  if (!nd) return nullptr;
  if (std::isnan(*nd)) return "nan";  // JSON has no NaN literal
  return *nd;
}

std::optional<double> nodata_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.is_string()) return std::stod(j.get<std::string>());
  return j.get<double>();
}

GeoRaster read_sidecar(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("sidecar JSON: ") + e.what());
  }
  const fs::path dir = fs::path(path).parent_path();
  try {
    std::string crs = doc.at("crs_id").get<std::string>();
    std::vector<Band> bands;
    for (const auto& jb : doc.at("bands")) {
      const int w = jb.at("width").get<int>();
      const int h = jb.at("height").get<int>();
      const SampleType st = sample_type_from_string(jb.at("sample_type").get<std::string>());
      const auto gt6 = jb.at("geotransform").get<std::array<double, 6>>();
      BandMeta meta;
      meta.name = jb.value("name", std::string());
      meta.gsd_m = jb.value("gsd_m", 0.0);
      meta.wavelength = jb.value("wavelength", std::string());
      const std::optional<double> nd =
          jb.contains("nodata") ? nodata_from_json(jb.at("nodata")) : std::nullopt;
      Band b(w, h, st, AffineGeoTransform::from_six(gt6), meta, nd);

      const std::string file = (dir / jb.at("file").get<std::string>()).string();
      const std::vector<uint8_t> raw = read_file(file);
      const std::size_t expect = std::size_t(w) * h * sample_size_bytes(st);
      if (raw.size() != expect)
        throw IoError("sample file \"" + file + "\" has " + std::to_string(raw.size()) +
                      " bytes, expected " + std::to_string(expect));
      const std::size_t step = sample_size_bytes(st);
      for (std::size_t i = 0; i < std::size_t(w) * h; ++i)
        b.samples()[i] = decode_sample(raw.data() + i * step, st, false);
      bands.push_back(std::move(b));
    }
    return GeoRaster(std::move(crs), std::move(bands));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("sidecar JSON: ") + e.what());
  }
}

void write_sidecar(const GeoRaster& r, const std::string& path) {
  const fs::path p(path);
  const fs::path dir = p.parent_path();
  const std::string stem = p.stem().string();

  nlohmann::ordered_json doc;
  doc["crs_id"] = r.crs_id();
  doc["bands"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.band_count(); ++i) {
    const Band& b = r.band(i);
    const std::string raw_name = stem + ".band" + std::to_string(i) + ".raw";
    nlohmann::ordered_json jb;
    jb["file"] = raw_name;
    jb["width"] = b.width();
    jb["height"] = b.height();
    jb["sample_type"] = to_string(b.sample_type());
    jb["geotransform"] = b.transform().six();
    jb["nodata"] = nodata_to_json(b.nodata());
    jb["name"] = b.meta().name;
    jb["gsd_m"] = b.meta().gsd_m;
    jb["wavelength"] = b.meta().wavelength;
    doc["bands"].push_back(jb);

    std::vector<uint8_t> raw;
    encode_samples(b, raw);
    write_file((dir / raw_name).string(), raw);
  }
  const std::string text = doc.dump(2) + "\n";
  write_file(path, std::vector<uint8_t>(text.begin(), text.end()));
}

// ---- minimal GeoTIFF ----
//
// Uncompressed single-plane strips, one sub-image (IFD) per band. Geometry
// travels in ModelTransformationTag plus a small GeoKey directory; band
// descriptors ride in ImageDescription as a JSON object. GDAL reads these
// files as-is, and the reader below accepts the ModelPixelScale/ModelTiepoint
// pair produced by most other writers.

constexpr uint16_t kTagWidth = 256, kTagHeight = 257, kTagBits = 258, kTagCompression = 259,
                   kTagPhotometric = 262, kTagDescription = 270, kTagStripOffsets = 273,
                   kTagSamplesPerPixel = 277, kTagRowsPerStrip = 278, kTagStripByteCounts = 279,
                   kTagPlanarConfig = 284, kTagSampleFormat = 339, kTagPixelScale = 33550,
                   kTagTiepoint = 33922, kTagModelTransformation = 34264, kTagGeoKeys = 34735,
                   kTagGdalNodata = 42113;
constexpr uint16_t kTypeAscii = 2, kTypeShort = 3, kTypeLong = 4, kTypeDouble = 12;

struct TiffEntryOut {
  uint16_t tag;
  uint16_t type;
  uint32_t count;
  uint32_t value;  // inline value or offset, already encoded
};

class TiffBuilder {
public:
  TiffBuilder() {
    put8('I');
    put8('I');
    put16(42);
    put32(0);  // first-IFD offset, patched in finish_ifd
  }

  std::size_t pos() const { return buf_.size(); }

  void pad_even() {
    if (buf_.size() & 1) put8(0);
  }

  std::size_t append_bytes(const std::vector<uint8_t>& data) {
    pad_even();
    const std::size_t at = buf_.size();
    buf_.insert(buf_.end(), data.begin(), data.end());
    return at;
  }

  std::size_t append_doubles(const std::vector<double>& v) {
    pad_even();
    const std::size_t at = buf_.size();
    for (double d : v) {
      uint64_t bits;
      std::memcpy(&bits, &d, 8);
      for (int i = 0; i < 8; ++i) put8(uint8_t(bits >> (8 * i)));
    }
    return at;
  }

  std::size_t append_shorts(const std::vector<uint16_t>& v) {
    pad_even();
    const std::size_t at = buf_.size();
    for (uint16_t s : v) put16(s);
    return at;
  }

  /// Writes one IFD from sorted entries and chains it to the previous one.
  void add_ifd(std::vector<TiffEntryOut> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const TiffEntryOut& a, const TiffEntryOut& b) { return a.tag < b.tag; });
    pad_even();
    const uint32_t at = uint32_t(buf_.size());
    patch32(next_ifd_patch_, at);
    put16(uint16_t(entries.size()));
    for (const TiffEntryOut& e : entries) {
      put16(e.tag);
      put16(e.type);
      put32(e.count);
      put32(e.value);
    }
    next_ifd_patch_ = buf_.size();
    put32(0);
  }

  const std::vector<uint8_t>& bytes() const { return buf_; }

private:
  void put8(uint8_t v) { buf_.push_back(v); }
  void put16(uint16_t v) {
    put8(uint8_t(v & 0xff));
    put8(uint8_t(v >> 8));
  }
  void put32(uint32_t v) {
    for (int i = 0; i < 4; ++i) put8(uint8_t(v >> (8 * i)));
  }
  void patch32(std::size_t at, uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_[at + i] = uint8_t(v >> (8 * i));
  }

  std::vector<uint8_t> buf_;
  std::size_t next_ifd_patch_ = 4;
};

std::optional<uint16_t> epsg_code(const std::string& crs) {
  std::string digits = crs;
  if (crs.size() > 5) {
    std::string head = crs.substr(0, 5);
    std::transform(head.begin(), head.end(), head.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    if (head == "EPSG:") digits = crs.substr(5);
  }
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(),
                                     [](unsigned char c) { return std::isdigit(c); }))
    return std::nullopt;
  const long v = std::stol(digits);
  if (v <= 0 || v > 65535) return std::nullopt;
  return uint16_t(v);
}

void write_tiff(const GeoRaster& r, const std::string& path) {
  TiffBuilder tb;
  for (const Band& b : r.bands()) {
    std::vector<uint8_t> strip;
    encode_samples(b, strip);
    const std::size_t strip_at = tb.append_bytes(strip);

    nlohmann::ordered_json desc;
    desc["name"] = b.meta().name;
    desc["gsd_m"] = b.meta().gsd_m;
    desc["wavelength"] = b.meta().wavelength;
    desc["crs_id"] = r.crs_id();
    std::string desc_text = desc.dump();
    std::vector<uint8_t> desc_bytes(desc_text.begin(), desc_text.end());
    desc_bytes.push_back(0);
    const std::size_t desc_at = tb.append_bytes(desc_bytes);

    const AffineGeoTransform& gt = b.transform();
    const std::size_t xf_at = tb.append_doubles({gt.pixel_width, gt.row_rotation, 0.0,
                                                 gt.origin_x, gt.col_rotation, gt.pixel_height,
                                                 0.0, gt.origin_y, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
                                                 0.0, 1.0});

    std::vector<uint16_t> keys = {1, 1, 0, 2, 1024, 0, 1, 1, 1025, 0, 1, 1};
    if (const std::optional<uint16_t> code = epsg_code(r.crs_id())) {
      keys[3] = 3;
      keys.insert(keys.end(), {3072, 0, 1, *code});
    }
    const std::size_t keys_at = tb.append_shorts(keys);

    // Values of four bytes or fewer live in the entry's value field itself;
    // the short nodata strings ("0", "nan") are the only payload small enough
    // to need that path.
    uint32_t nodata_len = 0, nodata_value = 0;
    if (b.nodata()) {
      char txt[64];
      std::snprintf(txt, sizeof txt, "%.17g", *b.nodata());
      std::vector<uint8_t> nb(txt, txt + std::strlen(txt));
      nb.push_back(0);
      nodata_len = uint32_t(nb.size());
      if (nb.size() <= 4) {
        for (std::size_t i = 0; i < nb.size(); ++i)
          nodata_value |= uint32_t(nb[i]) << (8 * i);
      } else {
        nodata_value = uint32_t(tb.append_bytes(nb));
      }
    }

    const uint16_t bits = uint16_t(sample_size_bytes(b.sample_type()) * 8);
    const uint16_t fmt = b.sample_type() == SampleType::f32 ? 3 : 1;
    std::vector<TiffEntryOut> e = {
        {kTagWidth, kTypeLong, 1, uint32_t(b.width())},
        {kTagHeight, kTypeLong, 1, uint32_t(b.height())},
        {kTagBits, kTypeShort, 1, bits},
        {kTagCompression, kTypeShort, 1, 1},
        {kTagPhotometric, kTypeShort, 1, 1},
        {kTagDescription, kTypeAscii, uint32_t(desc_bytes.size()), uint32_t(desc_at)},
        {kTagStripOffsets, kTypeLong, 1, uint32_t(strip_at)},
        {kTagSamplesPerPixel, kTypeShort, 1, 1},
        {kTagRowsPerStrip, kTypeLong, 1, uint32_t(b.height())},
        {kTagStripByteCounts, kTypeLong, 1, uint32_t(strip.size())},
        {kTagPlanarConfig, kTypeShort, 1, 1},
        {kTagSampleFormat, kTypeShort, 1, fmt},
        {kTagModelTransformation, kTypeDouble, 16, uint32_t(xf_at)},
        {kTagGeoKeys, kTypeShort, uint32_t(keys.size()), uint32_t(keys_at)},
    };
    if (nodata_len > 0) e.push_back({kTagGdalNodata, kTypeAscii, nodata_len, nodata_value});
    tb.add_ifd(std::move(e));
  }
  write_file(path, tb.bytes());
}

struct TiffEntryIn {
  uint16_t type = 0;
  uint32_t count = 0;
  std::vector<uint8_t> data;  // resolved value bytes, file byte order
};

class TiffReader {
public:
  TiffReader(std::vector<uint8_t> data, const std::string& path)
      : buf_(std::move(data)), path_(path) {
    if (buf_.size() < 8) throw IoError("\"" + path_ + "\" is not a TIFF (truncated header)");
    if (buf_[0] == 'I' && buf_[1] == 'I')
      swap_ = false;
    else if (buf_[0] == 'M' && buf_[1] == 'M')
      swap_ = true;
    else
      throw IoError("\"" + path_ + "\" is not a TIFF (bad byte-order mark)");
    if (u16(2) != 42) throw IoError("\"" + path_ + "\" is not a TIFF (bad magic)");
  }

  bool swapped() const { return swap_; }

  std::vector<std::map<uint16_t, TiffEntryIn>> ifds() {
    std::vector<std::map<uint16_t, TiffEntryIn>> out;
    uint32_t at = u32(4);
    while (at != 0) {
      check(at + 2, "IFD header");
      const uint16_t n = u16(at);
      std::map<uint16_t, TiffEntryIn> ifd;
      for (uint16_t i = 0; i < n; ++i) {
        const std::size_t ep = at + 2 + std::size_t(i) * 12;
        check(ep + 12, "IFD entry");
        const uint16_t tag = u16(ep);
        TiffEntryIn e;
        e.type = u16(ep + 2);
        e.count = u32(ep + 4);
        const std::size_t size = type_size(e.type) * e.count;
        if (size <= 4) {
          e.data.assign(buf_.begin() + long(ep + 8), buf_.begin() + long(ep + 8 + size));
        } else {
          const uint32_t off = u32(ep + 8);
          check(off + size, "out-of-line value");
          e.data.assign(buf_.begin() + off, buf_.begin() + long(off + size));
        }
        ifd[tag] = std::move(e);
      }
      check(at + 2 + std::size_t(n) * 12 + 4, "next-IFD pointer");
      at = u32(at + 2 + std::size_t(n) * 12);
      out.push_back(std::move(ifd));
    }
    return out;
  }

  uint32_t scalar(const TiffEntryIn& e, std::size_t idx = 0) const {
    const std::size_t s = type_size(e.type);
    const uint8_t* p = e.data.data() + idx * s;
    if (e.type == kTypeShort) return swap_ ? uint32_t(p[0] << 8 | p[1]) : uint32_t(p[1] << 8 | p[0]);
    if (e.type == kTypeLong)
      return swap_ ? (uint32_t(p[0]) << 24 | uint32_t(p[1]) << 16 | uint32_t(p[2]) << 8 | p[3])
                   : (uint32_t(p[3]) << 24 | uint32_t(p[2]) << 16 | uint32_t(p[1]) << 8 | p[0]);
    throw IoError("unexpected TIFF entry type " + std::to_string(e.type));
  }

  double dbl(const TiffEntryIn& e, std::size_t idx) const {
    const uint8_t* p = e.data.data() + idx * 8;
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
      bits |= uint64_t(p[swap_ ? 7 - i : i]) << (8 * i);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
  }

  const uint8_t* at(std::size_t off, std::size_t len) const {
    check(off + len, "strip data");
    return buf_.data() + off;
  }

private:
  static std::size_t type_size(uint16_t t) {
    switch (t) {
      case 1: case 2: case 6: case 7: return 1;
      case 3: case 8: return 2;
      case 4: case 9: case 11: return 4;
      case 5: case 10: case 12: return 8;
    }
    return 1;
  }

  void check(std::size_t need, const char* what) const {
    if (need > buf_.size())
      throw IoError("\"" + path_ + "\": truncated TIFF (" + std::string(what) + ")");
  }

  uint16_t u16(std::size_t at) const {
    return swap_ ? uint16_t(buf_[at] << 8 | buf_[at + 1]) : uint16_t(buf_[at + 1] << 8 | buf_[at]);
  }
  uint32_t u32(std::size_t at) const {
    return swap_ ? (uint32_t(buf_[at]) << 24 | uint32_t(buf_[at + 1]) << 16 |
                    uint32_t(buf_[at + 2]) << 8 | buf_[at + 3])
                 : (uint32_t(buf_[at + 3]) << 24 | uint32_t(buf_[at + 2]) << 16 |
                    uint32_t(buf_[at + 1]) << 8 | buf_[at]);
  }

  std::vector<uint8_t> buf_;
  std::string path_;
  bool swap_ = false;
};

GeoRaster read_tiff(const std::string& path) {
  TiffReader tr(read_file(path), path);
  std::vector<Band> bands;
  std::string crs;

  for (const auto& ifd : tr.ifds()) {
    auto need = [&](uint16_t tag, const char* name) -> const TiffEntryIn& {
      const auto it = ifd.find(tag);
      if (it == ifd.end())
        throw IoError("\"" + path + "\": TIFF sub-image lacks required tag " + name);
      return it->second;
    };
    const int w = int(tr.scalar(need(kTagWidth, "ImageWidth")));
    const int h = int(tr.scalar(need(kTagHeight, "ImageLength")));
    if (auto it = ifd.find(kTagCompression); it != ifd.end() && tr.scalar(it->second) != 1)
      throw IoError("\"" + path + "\": only uncompressed TIFF strips are supported");
    if (auto it = ifd.find(kTagSamplesPerPixel); it != ifd.end() && tr.scalar(it->second) != 1)
      throw IoError("\"" + path + "\": only one sample per pixel per sub-image is supported");

    const uint32_t bits = tr.scalar(need(kTagBits, "BitsPerSample"));
    uint32_t fmt = 1;
    if (auto it = ifd.find(kTagSampleFormat); it != ifd.end()) fmt = tr.scalar(it->second);
    SampleType st;
    if (bits == 8 && fmt == 1)
      st = SampleType::u8;
    else if (bits == 16 && fmt == 1)
      st = SampleType::u16;
    else if (bits == 32 && fmt == 3)
      st = SampleType::f32;
    else
      throw IoError("\"" + path + "\": unsupported sample layout (" + std::to_string(bits) +
                    " bits, format " + std::to_string(fmt) + ")");

    AffineGeoTransform gt;
    if (auto it = ifd.find(kTagModelTransformation);
        it != ifd.end() && it->second.count >= 16) {
      gt.pixel_width = tr.dbl(it->second, 0);
      gt.row_rotation = tr.dbl(it->second, 1);
      gt.origin_x = tr.dbl(it->second, 3);
      gt.col_rotation = tr.dbl(it->second, 4);
      gt.pixel_height = tr.dbl(it->second, 5);
      gt.origin_y = tr.dbl(it->second, 7);
    } else if (ifd.count(kTagPixelScale) && ifd.count(kTagTiepoint)) {
      const TiffEntryIn& sc = ifd.at(kTagPixelScale);
      const TiffEntryIn& tp = ifd.at(kTagTiepoint);
      if (sc.count < 2 || tp.count < 6)
        throw IoError("\"" + path + "\": malformed georeferencing tags");
      const double sx = tr.dbl(sc, 0), sy = tr.dbl(sc, 1);
      const double i = tr.dbl(tp, 0), j = tr.dbl(tp, 1);
      const double x = tr.dbl(tp, 3), y = tr.dbl(tp, 4);
      gt.pixel_width = sx;
      gt.pixel_height = -sy;
      gt.origin_x = x - i * sx;
      gt.origin_y = y + j * sy;
    } else {
      throw IoError("\"" + path + "\": TIFF sub-image carries no georeferencing");
    }

    BandMeta meta;
    std::string band_crs;
    if (auto it = ifd.find(kTagDescription); it != ifd.end() && !it->second.data.empty()) {
      std::string text(it->second.data.begin(), it->second.data.end());
      if (!text.empty() && text.back() == '\0') text.pop_back();
      if (nlohmann::json d = nlohmann::json::parse(text, nullptr, false); d.is_object()) {
        meta.name = d.value("name", std::string());
        meta.gsd_m = d.value("gsd_m", 0.0);
        meta.wavelength = d.value("wavelength", std::string());
        band_crs = d.value("crs_id", std::string());
      }
    }
    if (band_crs.empty()) {
      if (auto it = ifd.find(kTagGeoKeys); it != ifd.end()) {
        const TiffEntryIn& e = it->second;
        for (std::size_t k = 4; k + 3 < e.count; k += 4)
          if (tr.scalar(e, k) == 3072 && tr.scalar(e, k + 1) == 0)
            band_crs = "EPSG:" + std::to_string(tr.scalar(e, k + 3));
      }
    }
    if (crs.empty()) crs = band_crs;

    std::optional<double> nodata;
    if (auto it = ifd.find(kTagGdalNodata); it != ifd.end() && !it->second.data.empty()) {
      std::string text(it->second.data.begin(), it->second.data.end());
      nodata = std::stod(text);
    }

    Band b(w, h, st, gt, meta, nodata);

    const TiffEntryIn& offsets = need(kTagStripOffsets, "StripOffsets");
    const TiffEntryIn& counts = need(kTagStripByteCounts, "StripByteCounts");
    if (offsets.count != counts.count)
      throw IoError("\"" + path + "\": strip offset/count mismatch");
    uint32_t rows_per_strip = uint32_t(h);
    if (auto it = ifd.find(kTagRowsPerStrip); it != ifd.end())
      rows_per_strip = tr.scalar(it->second);
    if (rows_per_strip == 0) rows_per_strip = uint32_t(h);

    const std::size_t step = sample_size_bytes(st);
    std::size_t row = 0;
    for (std::size_t s = 0; s < offsets.count && row < std::size_t(h); ++s) {
      const uint32_t off = tr.scalar(offsets, s);
      const uint32_t len = tr.scalar(counts, s);
      const std::size_t rows = std::min<std::size_t>(rows_per_strip, std::size_t(h) - row);
      if (len < rows * std::size_t(w) * step)
        throw IoError("\"" + path + "\": strip " + std::to_string(s) + " is too short");
      const uint8_t* p = tr.at(off, len);
      for (std::size_t rr = 0; rr < rows; ++rr)
        for (std::size_t c = 0; c < std::size_t(w); ++c)
          b.set(int(c), int(row + rr),
                decode_sample(p + (rr * std::size_t(w) + c) * step, st, tr.swapped()));
      row += rows;
    }
    if (row < std::size_t(h)) throw IoError("\"" + path + "\": missing strip data");
    bands.push_back(std::move(b));
  }

  if (bands.empty()) throw IoError("\"" + path + "\": TIFF contains no sub-images");
  return GeoRaster(std::move(crs), std::move(bands));
}

}  // namespace

GeoRaster read_raster(const std::string& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".json") return read_sidecar(path);
  if (ext == ".tif" || ext == ".tiff") return read_tiff(path);
  throw IoError("unrecognized raster extension \"" + ext + "\" (expected .json or .tif)");
}

void write_raster(const GeoRaster& r, const std::string& path) {
  if (r.bands().empty()) throw Error("refusing to write a raster with no bands");
  const std::string ext = lower_ext(path);
  if (ext == ".json") return write_sidecar(r, path);
  if (ext == ".tif" || ext == ".tiff") return write_tiff(r, path);
  throw IoError("unrecognized raster extension \"" + ext + "\" (expected .json or .tif)");
}

}  // namespace mura
