// csv.hpp — plot-ready CSV output: one header row, doubles printed with 17
// significant digits so files are lossless and byte-stable across runs.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qjump {

class CsvWriter {
  public:
    explicit CsvWriter(const std::filesystem::path& path) : path_(path), out_(path) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path.string());
    }

    ~CsvWriter() {
        if (out_.is_open()) out_.close(); // errors surface via explicit close()
    }

    void header(std::initializer_list<std::string_view> columns) {
        bool first = true;
        for (const auto& col : columns) {
            if (!first) out_ << ',';
            out_ << col;
            first = false;
        }
        out_ << '\n';
    }

    void header(const std::vector<std::string>& columns) {
        bool first = true;
        for (const auto& col : columns) {
            if (!first) out_ << ',';
            out_ << col;
            first = false;
        }
        out_ << '\n';
    }

    static std::string format(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

    class Row {
      public:
        explicit Row(CsvWriter& w) : w_(w) {}
        ~Row() { w_.out_ << '\n'; }
        Row& col(double v) { return raw(format(v)); }
        Row& col(std::size_t v) { return raw(std::to_string(v)); }
        Row& col(std::string_view v) { return raw(std::string(v)); }

      private:
        Row& raw(const std::string& s) {
            if (!first_) w_.out_ << ',';
            w_.out_ << s;
            first_ = false;
            return *this;
        }
        CsvWriter& w_;
        bool first_ = true;
    };

    Row row() { return Row(*this); }

    void close() {
        if (!out_.is_open()) return;
        out_.flush();
        if (!out_) throw std::runtime_error("write failure on: " + path_.string());
        out_.close();
    }

  private:
    std::filesystem::path path_;
    std::ofstream out_;
};

} // namespace qjump
