#include "iselinv/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace iselinv {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.precision(17);
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

std::string next_data_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    if (line[pos] == '%') continue;
    return line;
  }
  return {};
}

}  // namespace

void write_matrix_market(const SparseSymmetric& a, const std::filesystem::path& path) {
  auto out = open_out(path);
  const bool real = a.is_real();
  out << "%%MatrixMarket matrix coordinate " << (real ? "real" : "complex") << " symmetric\n";
  out << a.size() << " " << a.size() << " " << a.nnz_lower() << "\n";
  for (const auto& e : a.lower_entries()) {
    out << (e.row + 1) << " " << (e.col + 1) << " " << e.value.real();
    if (!real) out << " " << e.value.imag();
    out << "\n";
  }
}

SparseSymmetric read_matrix_market(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string banner;
  if (!std::getline(in, banner)) throw IoError(path.string() + ": empty file");
  std::istringstream bs(banner);
  std::string tag, object, format, field, symmetry;
  bs >> tag >> object >> format >> field >> symmetry;
  if (lower(tag) != "%%matrixmarket" || lower(object) != "matrix" ||
      lower(format) != "coordinate") {
    throw IoError(path.string() + ": expected a MatrixMarket coordinate banner");
  }
  field = lower(field);
  if (field != "real" && field != "complex" && field != "integer") {
    throw IoError(path.string() + ": unsupported field '" + field + "'");
  }
  if (lower(symmetry) != "symmetric") {
    throw IoError(path.string() + ": only the symmetric qualifier is supported");
  }

  std::istringstream sz(next_data_line(in));
  long rows = 0, cols = 0, nnz = 0;
  if (!(sz >> rows >> cols >> nnz) || rows != cols || rows < 0) {
    throw IoError(path.string() + ": bad size line");
  }
  std::vector<Triplet> trip;
  trip.reserve(nnz);
  for (long k = 0; k < nnz; ++k) {
    std::istringstream ls(next_data_line(in));
    long i = 0, j = 0;
    double re = 0, im = 0;
    if (!(ls >> i >> j >> re)) throw IoError(path.string() + ": truncated entry list");
    if (field == "complex" && !(ls >> im)) {
      throw IoError(path.string() + ": complex entry missing imaginary part");
    }
    if (i < j) {
      throw IoError(path.string() + ": symmetric files must store the lower triangle (entry " +
                    std::to_string(i) + " " + std::to_string(j) + ")");
    }
    trip.push_back({static_cast<Index>(i - 1), static_cast<Index>(j - 1), Complex{re, im}});
  }
  return build_from_triplets(static_cast<Index>(rows), trip);
}

void write_factors(const LdltFactors& f, const std::filesystem::path& l_path,
                   const std::filesystem::path& d_path) {
  const FillPattern& p = f.pattern();
  {
    auto out = open_out(l_path);
    Index nnz = 0;
    for (Index j = 0; j < p.size(); ++j) nnz += p.column_end(j) - p.column_begin(j) - 1;
    out << "%%MatrixMarket matrix coordinate complex general\n";
    out << "% strictly lower factor, unit diagonal implied\n";
    out << p.size() << " " << p.size() << " " << nnz << "\n";
    for (Index j = 0; j < p.size(); ++j) {
      for (Index s = p.column_begin(j) + 1; s < p.column_end(j); ++s) {
        const Complex v = f.lower_at_slot(s);
        out << (p.row_at(s) + 1) << " " << (j + 1) << " " << v.real() << " " << v.imag() << "\n";
      }
    }
  }
  {
    auto out = open_out(d_path);
    out << "%%MatrixMarket matrix array complex general\n";
    out << f.size() << " 1\n";
    for (Index j = 0; j < f.size(); ++j) {
      out << f.d(j).real() << " " << f.d(j).imag() << "\n";
    }
  }
}

LdltFactors read_factors(const std::filesystem::path& l_path,
                         const std::filesystem::path& d_path) {
  auto in = open_in(l_path);
  std::string banner;
  std::getline(in, banner);
  if (lower(banner).find("coordinate complex general") == std::string::npos) {
    throw IoError(l_path.string() + ": expected a complex general coordinate file");
  }
  std::istringstream sz(next_data_line(in));
  long rows = 0, cols = 0, nnz = 0;
  if (!(sz >> rows >> cols >> nnz) || rows != cols) throw IoError(l_path.string() + ": bad size");
  const Index n = static_cast<Index>(rows);

  std::vector<std::vector<std::pair<Index, Complex>>> cols_data(n);
  for (long k = 0; k < nnz; ++k) {
    std::istringstream ls(next_data_line(in));
    long i = 0, j = 0;
    double re = 0, im = 0;
    if (!(ls >> i >> j >> re >> im)) throw IoError(l_path.string() + ": truncated entry list");
    if (i <= j) throw IoError(l_path.string() + ": factor entries must be strictly lower");
    cols_data[j - 1].push_back({static_cast<Index>(i - 1), Complex{re, im}});
  }

  std::vector<Complex> diag(n);
  {
    auto din = open_in(d_path);
    std::getline(din, banner);
    std::istringstream dsz(next_data_line(din));
    long dn = 0, one = 0;
    if (!(dsz >> dn >> one) || dn != n || one != 1) throw IoError(d_path.string() + ": bad size");
    for (Index j = 0; j < n; ++j) {
      std::istringstream ls(next_data_line(din));
      double re = 0, im = 0;
      if (!(ls >> re >> im)) throw IoError(d_path.string() + ": truncated diagonal");
      diag[j] = Complex{re, im};
    }
  }

  std::vector<Index> col_ptr(n + 1, 0);
  for (Index j = 0; j < n; ++j) {
    std::sort(cols_data[j].begin(), cols_data[j].end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    col_ptr[j + 1] = col_ptr[j] + static_cast<Index>(cols_data[j].size()) + 1;
  }
  std::vector<Index> prows(col_ptr[n]);
  std::vector<std::uint16_t> plevels(col_ptr[n], 0);
  std::vector<Complex> lvals(col_ptr[n], Complex{0, 0});
  for (Index j = 0; j < n; ++j) {
    Index s = col_ptr[j];
    prows[s] = j;
    for (const auto& [i, v] : cols_data[j]) {
      prows[++s] = i;
      lvals[s] = v;
    }
  }
  auto pattern = std::make_shared<FillPattern>(FillPattern::from_columns(
      n, kValueDrivenPattern, std::move(col_ptr), std::move(prows), std::move(plevels)));
  return LdltFactors(std::move(pattern), std::move(lvals), std::move(diag), {});
}

void write_selected_inverse(const SelectedInverse& b, const std::filesystem::path& path) {
  const FillPattern& p = b.pattern();
  std::vector<Triplet> trip;
  trip.reserve(p.nnz());
  for (Index j = 0; j < p.size(); ++j) {
    for (Index s = p.column_begin(j); s < p.column_end(j); ++s) {
      trip.push_back({p.row_at(s), j, b.at_slot(s)});
    }
  }
  write_matrix_market(build_from_triplets(p.size(), trip), path);
}

void write_permutation(const Permutation& p, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (Index i = 0; i < p.size(); ++i) out << (p(i) + 1) << "\n";
}

Permutation read_permutation(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<Index> fwd;
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;
    fwd.push_back(static_cast<Index>(std::stol(line) - 1));
  }
  return Permutation::from_forward(std::move(fwd));
}

void write_pattern_csv(const FillPattern& p, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "i,j,level\n";
  for (Index j = 0; j < p.size(); ++j) {
    for (Index s = p.column_begin(j); s < p.column_end(j); ++s) {
      out << (p.row_at(s) + 1) << "," << (j + 1) << "," << p.level_at(s) << "\n";
    }
  }
}

}  // namespace iselinv
