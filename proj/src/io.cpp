#include "ensembed/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ensembed {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // '\n' line ends everywhere
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

void write_matrix_rows(std::ofstream& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

} // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void dump_view(const std::string& path, const Matrix& matrix) {
  auto out = open_out(path);
  out << matrix.rows() << ' ' << matrix.cols() << '\n';
  write_matrix_rows(out, matrix);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Matrix load_view(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open view file: " + path);
  Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || cols < 1)
    throw std::runtime_error(path + ": bad view header, expected 'N D'");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      if (!(in >> m(i, j)))
        throw std::runtime_error(path + ": truncated view data at row " +
                                 std::to_string(i));
  return m;
}

std::vector<std::string> dump_views(const std::string& dir,
                                    const std::vector<Matrix>& views) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> names;
  names.reserve(views.size());
  for (std::size_t m = 0; m < views.size(); ++m) {
    std::ostringstream name;
    name << "view_" << m << "_d" << views[m].cols() << ".txt";
    names.push_back(name.str());
    dump_view(dir + "/" + names.back(), views[m]);
  }
  auto manifest = open_out(dir + "/views.list");
  for (const auto& name : names) manifest << name << '\n';
  return names;
}

std::vector<Matrix> load_views(const std::string& dir) {
  std::ifstream manifest(dir + "/views.list");
  if (!manifest)
    throw std::runtime_error("cannot open view manifest: " + dir +
                             "/views.list");
  std::vector<Matrix> views;
  std::string name;
  while (std::getline(manifest, name)) {
    if (name.empty()) continue;
    views.push_back(load_view(dir + "/" + name));
  }
  if (views.empty())
    throw std::runtime_error("view manifest is empty: " + dir + "/views.list");
  return views;
}

void dump_model(const std::string& path, const Parafac2Model<Real>& model) {
  auto out = open_out(path);
  out << model.V.rows() << ' ' << model.rank << ' ' << model.Q.size() << '\n';
  write_matrix_rows(out, model.V);
  write_matrix_rows(out, model.H);
  for (const auto& s : model.s) {
    for (Index i = 0; i < s.size(); ++i) {
      if (i) out << ' ';
      out << format_double(s(i));
    }
    out << '\n';
  }
  for (const auto& q : model.Q) write_matrix_rows(out, q);
  if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace ensembed
