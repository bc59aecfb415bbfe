#pragma once

// Structured key=value log lines on stderr.

#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <string_view>

namespace ddp::log {

class Line {
 public:
  Line(std::string_view level, std::string_view event) {
    buf_ << "level=" << level << " event=" << event;
  }
  Line(const Line&) = delete;
  Line& operator=(const Line&) = delete;
  ~Line() { std::cerr << buf_.str() << '\n'; }

  template <class T>
  Line& kv(std::string_view key, const T& value) {
    std::ostringstream v;
    v << value;
    std::string s = v.str();
    buf_ << ' ' << key << '=';
    if (s.find_first_of(" \"=") != std::string::npos || s.empty()) {
      buf_ << std::quoted(s);
    } else {
      buf_ << s;
    }
    return *this;
  }

 private:
  std::ostringstream buf_;
};

inline Line info(std::string_view event) { return Line("info", event); }
inline Line warn(std::string_view event) { return Line("warn", event); }

}  // namespace ddp::log
