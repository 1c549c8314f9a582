// Copyright 2026 The voxtend Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "voxtend/formats.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "voxtend/error.hpp"

namespace voxtend {

namespace {

// Minimal line/token reader shared by the text formats.
class TextReader {
 public:
  TextReader(std::string_view text, std::string format)
      : text_(text), format_(std::move(format)) {}

  // Next non-empty line, or false at end of input.
  bool line(std::string_view& out) {
    while (pos_ < text_.size()) {
      std::size_t end = text_.find('\n', pos_);
      if (end == std::string_view::npos) end = text_.size();
      std::string_view l = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
      ++line_no_;
      if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
      if (!l.empty()) {
        out = l;
        return true;
      }
    }
    return false;
  }

  [[noreturn]] void error(const std::string& why) const {
    fail(ErrorCode::kFormat, format_ + " line " + std::to_string(line_no_) + ": " + why);
  }

 private:
  std::string_view text_;
  std::string format_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t start = s.find_first_not_of(" \t\r\n", pos);
    if (start == std::string_view::npos) break;
    std::size_t end = s.find_first_of(" \t\r\n", start);
    if (end == std::string_view::npos) end = s.size();
    out.push_back(s.substr(start, end - start));
    pos = end;
  }
  return out;
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string format_decimal(double value) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, p);
}

std::string serialize_feature_map(const FeatureMap& x) {
  std::string out = "voxtend-fbank v1\n";
  out += "frames=" + std::to_string(x.frames()) + " bins=" + std::to_string(x.bins()) + "\n";
  for (std::size_t f = 0; f < x.frames(); ++f) {
    for (std::size_t m = 0; m < x.bins(); ++m) {
      if (m) out += ' ';
      out += format17(x(f, m));
    }
    out += '\n';
  }
  return out;
}

FeatureMap parse_feature_map(std::string_view text) {
  TextReader r(text, "fbank");
  std::string_view line;
  if (!r.line(line) || line != "voxtend-fbank v1") r.error("expected header 'voxtend-fbank v1'");
  if (!r.line(line)) r.error("missing 'frames=<F> bins=<M>'");
  const auto dims = tokens(line);
  std::size_t frames = 0, bins = 0;
  if (dims.size() != 2 || dims[0].substr(0, 7) != "frames=" ||
      dims[1].substr(0, 5) != "bins=" || !parse_number(dims[0].substr(7), frames) ||
      !parse_number(dims[1].substr(5), bins) || frames == 0 || bins == 0) {
    r.error("expected 'frames=<F> bins=<M>' with positive values");
  }
  std::vector<double> values;
  values.reserve(frames * bins);
  for (std::size_t f = 0; f < frames; ++f) {
    if (!r.line(line)) r.error("expected " + std::to_string(frames) + " frame rows");
    const auto row = tokens(line);
    if (row.size() != bins) r.error("expected " + std::to_string(bins) + " values");
    for (auto tok : row) {
      double v = 0.0;
      if (!parse_number(tok, v) || !std::isfinite(v)) r.error("invalid value '" + std::string(tok) + "'");
      values.push_back(v);
    }
  }
  if (r.line(line)) r.error("unexpected trailing content");
  return FeatureMap(frames, bins, std::move(values));
}

std::string serialize_tensors(const std::vector<NamedTensor>& tensors) {
  std::string out = "voxtend-net v1\n";
  for (const auto& t : tensors) {
    out += "tensor " + t.name + " " + std::to_string(t.value.rows()) + " " +
           std::to_string(t.value.cols()) + "\n";
    for (Eigen::Index r = 0; r < t.value.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.value.cols(); ++c) {
        if (c) out += ' ';
        out += format17(t.value(r, c));
      }
      out += '\n';
    }
  }
  return out;
}

std::vector<NamedTensor> parse_tensors(std::string_view text) {
  TextReader r(text, "checkpoint");
  std::string_view line;
  if (!r.line(line) || line != "voxtend-net v1") r.error("expected header 'voxtend-net v1'");
  std::vector<NamedTensor> out;
  while (r.line(line)) {
    const auto head = tokens(line);
    Eigen::Index rows = 0, cols = 0;
    if (head.size() != 4 || head[0] != "tensor" || !parse_number(head[2], rows) ||
        !parse_number(head[3], cols) || rows < 0 || cols < 0) {
      r.error("expected 'tensor <name> <rows> <cols>'");
    }
    NamedTensor t{std::string(head[1]), Eigen::MatrixXd(rows, cols)};
    Eigen::Index filled = 0;
    const Eigen::Index total = rows * cols;
    while (filled < total) {
      if (!r.line(line)) r.error("tensor " + t.name + " is truncated");
      for (auto tok : tokens(line)) {
        if (filled == total) r.error("tensor " + t.name + " has too many values");
        double v = 0.0;
        if (!parse_number(tok, v)) r.error("invalid value '" + std::string(tok) + "'");
        t.value(filled / cols, filled % cols) = v;
        ++filled;
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

namespace {

const Eigen::MatrixXd& find_tensor(const std::vector<NamedTensor>& tensors,
                                   std::string_view name) {
  for (const auto& t : tensors) {
    if (t.name == name) return t.value;
  }
  fail(ErrorCode::kFormat, "checkpoint has no tensor '" + std::string(name) + "'");
}

}  // namespace

std::string serialize_net(const SmallNetEstimator& net) {
  const auto& s = net.shape();
  std::vector<NamedTensor> tensors;
  Eigen::MatrixXd shape(1, 5);
  shape << static_cast<double>(s.frames), static_cast<double>(s.bins),
      static_cast<double>(s.hidden), static_cast<double>(s.cond_dim),
      static_cast<double>(s.steps);
  tensors.push_back({"shape", shape});
  for (std::size_t i = 0; i < NetTensors::kCount; ++i) {
    tensors.push_back({std::string(NetTensors::kNames[i]), net.params()[i]});
  }
  return serialize_tensors(tensors);
}

SmallNetEstimator parse_net(std::string_view text) {
  const auto tensors = parse_tensors(text);
  const auto& shape = find_tensor(tensors, "shape");
  if (shape.rows() != 1 || shape.cols() != 5) {
    fail(ErrorCode::kFormat, "checkpoint tensor 'shape' must be 1x5");
  }
  auto dim = [&](Eigen::Index i) {
    const double v = shape(0, i);
    if (!(v >= 1.0) || v != std::floor(v)) {
      fail(ErrorCode::kFormat, "checkpoint shape entries must be positive integers");
    }
    return static_cast<std::size_t>(v);
  };
  SmallNetShape s{dim(0), dim(1), dim(2), dim(3), dim(4)};
  NetTensors params;
  for (std::size_t i = 0; i < NetTensors::kCount; ++i) {
    params[i] = find_tensor(tensors, NetTensors::kNames[i]);
  }
  return SmallNetEstimator(s, std::move(params));
}

std::string serialize_embedder(const ToyEmbedder& embedder) {
  Eigen::MatrixXd w(static_cast<Eigen::Index>(embedder.dim()),
                    static_cast<Eigen::Index>(embedder.bins()));
  const auto proj = embedder.projection();
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      w(r, c) = proj[static_cast<std::size_t>(r * w.cols() + c)];
    }
  }
  return serialize_tensors({{"embedder.projection", w}});
}

ToyEmbedder parse_embedder(std::string_view text) {
  const auto tensors = parse_tensors(text);
  const auto& w = find_tensor(tensors, "embedder.projection");
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(w.size()));
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) values.push_back(w(r, c));
  }
  return ToyEmbedder(static_cast<std::size_t>(w.rows()),
                     static_cast<std::size_t>(w.cols()), std::move(values));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::kIo, "cannot move " + tmp.string() + " to " + path.string());
}

}  // namespace voxtend
