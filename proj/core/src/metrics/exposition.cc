// Copyright 2026 The Scalepool Authors.
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

#include "scalepool/metrics/exposition.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <tuple>

#include "scalepool/common/errors.h"

namespace scalepool::metrics {

namespace {

void append_label_value(std::string& out, std::string_view value) {
  for (char c : value) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
}

void append_line(std::string& out, const std::string& name, const Labels& labels, double value) {
  out += name;
  if (!labels.empty()) {
    out += '{';
    bool first = true;
    for (const auto& [k, v] : labels) {
      if (!first) out += ',';
      first = false;
      out += k;
      out += "=\"";
      append_label_value(out, v);
      out += '"';
    }
    out += '}';
  }
  out += ' ';
  out += format_value(value);
  out += '\n';
}

// Cursor over one line of exposition text.
class LineParser {
 public:
  LineParser(std::string_view line, size_t line_no) : s_(line), line_no_(line_no) {}

  Sample parse() {
    Sample sample;
    sample.name = take_while([](char c) {
      return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
             c == '_' || c == ':';
    });
    if (!valid_metric_name(sample.name)) fail("invalid metric name");
    if (peek() == '{') {
      ++pos_;
      parse_labels(sample.labels);
    }
    if (!skip_blanks()) fail("expected whitespace before value");
    const std::string_view value_tok = take_token();
    sample.value = parse_value(value_tok);
    if (skip_blanks() && pos_ < s_.size()) {
      const std::string_view ts_tok = take_token();
      int64_t ts = 0;
      const auto [p, ec] = std::from_chars(ts_tok.data(), ts_tok.data() + ts_tok.size(), ts);
      if (ec != std::errc() || p != ts_tok.data() + ts_tok.size()) fail("malformed timestamp");
      sample.timestamp = at_ms(ts);
      skip_blanks();
    }
    if (pos_ != s_.size()) fail("trailing characters");
    return sample;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_no_, what); }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  template <typename Pred>
  std::string take_while(Pred pred) {
    const size_t start = pos_;
    while (pos_ < s_.size() && pred(s_[pos_])) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  bool skip_blanks() {
    const size_t start = pos_;
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    return pos_ > start;
  }

  std::string_view take_token() {
    const size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ' ' && s_[pos_] != '\t') ++pos_;
    return s_.substr(start, pos_ - start);
  }

  void parse_labels(Labels& labels) {
    while (true) {
      skip_blanks();
      if (peek() == '}') {
        ++pos_;
        return;
      }
      std::string label = take_while([](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_';
      });
      if (!valid_label_name(label)) fail("invalid label name");
      skip_blanks();
      if (peek() != '=') fail("expected '=' after label name");
      ++pos_;
      skip_blanks();
      if (peek() != '"') fail("expected quoted label value");
      ++pos_;
      std::string value;
      bool closed = false;
      while (pos_ < s_.size()) {
        const char c = s_[pos_++];
        if (c == '"') {
          closed = true;
          break;
        }
        if (c == '\\') {
          if (pos_ >= s_.size()) fail("dangling escape in label value");
          const char e = s_[pos_++];
          if (e == 'n') value += '\n';
          else if (e == '\\' || e == '"') value += e;
          else fail("unknown escape in label value");
        } else {
          value += c;
        }
      }
      if (!closed) fail("unterminated label value");
      if (!labels.emplace(std::move(label), std::move(value)).second) fail("duplicate label");
      skip_blanks();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() != '}') {
        fail("expected ',' or '}' in label set");
      }
    }
  }

  double parse_value(std::string_view tok) const {
    if (tok == "NaN") return std::numeric_limits<double>::quiet_NaN();
    if (tok == "+Inf" || tok == "Inf") return std::numeric_limits<double>::infinity();
    if (tok == "-Inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || p != tok.data() + tok.size()) {
      fail("malformed value");
    }
    return v;
  }

  std::string_view s_;
  size_t pos_ = 0;
  size_t line_no_;
};

}  // namespace

std::string format_value(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v < 0 ? "-Inf" : "+Inf";
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

std::string encode_exposition(const Registry& registry) {
  std::string out;
  for (const auto& e : registry.snapshot()) {
    append_line(out, e.key.name, e.key.labels, e.value);
  }
  return out;
}

std::string encode_exposition(std::span<const Sample> samples) {
  std::vector<const Sample*> ordered;
  ordered.reserve(samples.size());
  for (const Sample& s : samples) ordered.push_back(&s);
  std::ranges::sort(ordered, [](const Sample* a, const Sample* b) {
    return std::tie(a->name, a->labels) < std::tie(b->name, b->labels);
  });
  std::string out;
  for (const Sample* s : ordered) append_line(out, s->name, s->labels, s->value);
  return out;
}

std::vector<Sample> parse_exposition(std::string_view text) {
  std::vector<Sample> out;
  size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const size_t first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;
    out.push_back(LineParser(line.substr(first), line_no).parse());
  }
  return out;
}

}  // namespace scalepool::metrics
