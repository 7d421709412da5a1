#include "rset/regress.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>

#include "json.hpp"

#include "rset/error.hpp"
#include "rset/parallel.hpp"

namespace rset {
namespace {

const char* feature_kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::constant: return "constant";
    case FeatureKind::coord: return "coord";
    case FeatureKind::log_coord: return "log_coord";
    case FeatureKind::product: return "product";
  }
  fail(Errc::bad_input, "unknown feature kind");
}

FeatureKind feature_kind_from_name(const std::string& name) {
  for (FeatureKind kind : {FeatureKind::constant, FeatureKind::coord, FeatureKind::log_coord,
                           FeatureKind::product})
    if (name == feature_kind_name(kind)) return kind;
  fail(Errc::bad_input, "unknown feature kind \"" + name + "\"");
}

double coordinate(int k, double x, double y) { return k == 0 ? x : y; }

double term_value(const FeatureTerm& term, double x, double y) {
  switch (term.kind) {
    case FeatureKind::constant:
      return 1.0;
    case FeatureKind::coord:
      return coordinate(term.k, x, y);
    case FeatureKind::log_coord: {
      double v = coordinate(term.k, x, y);
      if (!(v > 0.0))
        fail(Errc::domain_violation, "log feature of coordinate " + std::to_string(term.k) +
                                         " evaluated at nonpositive value " + std::to_string(v));
      return std::log(v);
    }
    case FeatureKind::product:
      return coordinate(term.k, x, y) * coordinate(term.l, x, y);
  }
  fail(Errc::bad_input, "unknown feature kind");
}

Eigen::MatrixXd sigma_matrix(const FittedModel& model) {
  const auto m = static_cast<Eigen::Index>(model.beta.size());
  if (model.sigma.size() != model.beta.size() * model.beta.size())
    fail(Errc::dimension_mismatch, "covariance size does not match coefficient count");
  Eigen::MatrixXd S(m, m);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < m; ++c) S(r, c) = model.sigma[static_cast<std::size_t>(r * m + c)];
  double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    fail(Errc::not_psd, "coefficient covariance is not symmetric");
  return S;
}

// Lower-triangular factor L with L L' = S; spectral fallback covers the
// positive semidefinite boundary.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& S) {
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success) fail(Errc::not_psd, "eigendecomposition of covariance failed");
  Eigen::VectorXd vals = es.eigenvalues();
  double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
  if (vals.minCoeff() < -1e-10 * scale)
    fail(Errc::not_psd, "coefficient covariance has a negative eigenvalue");
  return es.eigenvectors() * vals.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

}  // namespace

void FeatureMap::validate() const {
  if (dims < 1 || dims > 2) fail(Errc::bad_input, "feature map dimension must be 1 or 2");
  if (terms.empty()) fail(Errc::bad_input, "feature map has no terms");
  for (const FeatureTerm& t : terms) {
    switch (t.kind) {
      case FeatureKind::constant:
        break;
      case FeatureKind::coord:
      case FeatureKind::log_coord:
        if (t.k < 0 || t.k >= dims) fail(Errc::bad_input, "feature coordinate index out of range");
        break;
      case FeatureKind::product:
        if (t.k < 0 || t.k >= dims || t.l < 0 || t.l >= dims)
          fail(Errc::bad_input, "feature coordinate index out of range");
        break;
    }
  }
}

std::vector<double> FeatureMap::evaluate(double x, double y) const {
  std::vector<double> out(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) out[i] = term_value(terms[i], x, y);
  return out;
}

FeatureMap feature_map_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(Errc::bad_input, std::string("feature map is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("dims") || !j.contains("terms"))
    fail(Errc::bad_input, "feature map needs \"dims\" and \"terms\"");
  FeatureMap fmap;
  fmap.dims = j.at("dims").get<int>();
  for (const auto& jt : j.at("terms")) {
    FeatureTerm term;
    term.kind = feature_kind_from_name(jt.at("type").get<std::string>());
    if (jt.contains("k")) term.k = jt.at("k").get<int>();
    if (jt.contains("l")) term.l = jt.at("l").get<int>();
    if (term.kind == FeatureKind::product && term.l < 0) term.l = term.k;
    fmap.terms.push_back(term);
  }
  fmap.validate();
  return fmap;
}

std::string feature_map_to_json(const FeatureMap& fmap) {
  nlohmann::json terms = nlohmann::json::array();
  for (const FeatureTerm& t : fmap.terms) {
    nlohmann::json jt;
    jt["type"] = feature_kind_name(t.kind);
    if (t.kind == FeatureKind::coord || t.kind == FeatureKind::log_coord) jt["k"] = t.k;
    if (t.kind == FeatureKind::product) {
      jt["k"] = t.k;
      jt["l"] = t.l;
    }
    terms.push_back(jt);
  }
  nlohmann::json j;
  j["dims"] = fmap.dims;
  j["terms"] = terms;
  return j.dump(2);
}

FittedModel ols_fit(const std::vector<std::vector<double>>& rows,
                    const std::vector<double>& response, const FeatureMap& fmap) {
  fmap.validate();
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto m = static_cast<Eigen::Index>(fmap.size());
  if (response.size() != rows.size())
    fail(Errc::dimension_mismatch, "response length does not match row count");
  if (n < m + 1)
    fail(Errc::bad_input, "need at least " + std::to_string(m + 1) + " rows to fit " +
                              std::to_string(m) + " coefficients");
  Eigen::MatrixXd X(n, m);
  Eigen::VectorXd y(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const std::vector<double>& row = rows[static_cast<std::size_t>(r)];
    if (static_cast<int>(row.size()) != fmap.dims)
      fail(Errc::dimension_mismatch, "covariate row " + std::to_string(r) + " has " +
                                         std::to_string(row.size()) + " entries, expected " +
                                         std::to_string(fmap.dims));
    std::vector<double> feats = fmap.evaluate(row[0], fmap.dims > 1 ? row[1] : 0.0);
    for (Eigen::Index c = 0; c < m; ++c) X(r, c) = feats[static_cast<std::size_t>(c)];
    y(r) = response[static_cast<std::size_t>(r)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < m) fail(Errc::rank_deficient, "design matrix is rank deficient");
  Eigen::VectorXd beta = qr.solve(y);
  double rss = (y - X * beta).squaredNorm();
  FittedModel model;
  model.n = static_cast<int>(n);
  model.beta.assign(beta.data(), beta.data() + m);
  model.sigma2 = rss / static_cast<double>(n - m);
  Eigen::MatrixXd xtx_inv =
      (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(m, m));
  Eigen::MatrixXd sigma = model.sigma2 * xtx_inv;
  model.sigma.resize(static_cast<std::size_t>(m) * m);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < m; ++c)
      model.sigma[static_cast<std::size_t>(r * m + c)] = sigma(r, c);
  return model;
}

ScalarField predict_field(const FittedModel& model, const FeatureMap& fmap,
                          const GridDomain& domain, int sign) {
  fmap.validate();
  domain.validate();
  if (sign != 1 && sign != -1) fail(Errc::bad_input, "sign must be +1 or -1");
  if (model.beta.size() != static_cast<std::size_t>(fmap.size()))
    fail(Errc::dimension_mismatch, "coefficient count does not match feature map");
  ScalarField field(domain);
  for (int j = 0; j < domain.ny; ++j) {
    for (int i = 0; i < domain.nx; ++i) {
      Point p = coord_of(domain, i, j);
      std::vector<double> feats = fmap.evaluate(p.x, p.y);
      double acc = 0.0;
      for (std::size_t c = 0; c < feats.size(); ++c) acc += model.beta[c] * feats[c];
      field.set(i, j, sign * acc);
    }
  }
  return field;
}

QuantileReport gaussian_field_quantiles(const FittedModel& model, const FeatureMap& fmap,
                                        const BinaryMask& window, double alpha, int S,
                                        std::uint64_t seed, bool allow_corner_shortcut) {
  fmap.validate();
  if (!(alpha > 0.0 && alpha < 1.0)) fail(Errc::bad_input, "alpha must lie in (0,1)");
  if (S < 1) fail(Errc::bad_input, "draw count must be at least 1");
  if (model.beta.size() != static_cast<std::size_t>(fmap.size()))
    fail(Errc::dimension_mismatch, "coefficient count does not match feature map");
  Eigen::MatrixXd L = psd_factor(sigma_matrix(model));
  const GridDomain& d = window.domain();

  bool squared_term = false;
  for (const FeatureTerm& t : fmap.terms)
    if (t.kind == FeatureKind::product && t.k == t.l) squared_term = true;
  bool corners_only = allow_corner_shortcut && !squared_term && window.all();

  std::vector<Point> pts;
  if (corners_only) {
    pts = {coord_of(d, 0, 0), coord_of(d, d.nx - 1, 0), coord_of(d, 0, d.ny - 1),
           coord_of(d, d.nx - 1, d.ny - 1)};
  } else {
    for (std::size_t k = 0; k < d.cell_count(); ++k) {
      if (!window[k]) continue;
      pts.push_back(coord_of(d, static_cast<int>(k % d.nx), static_cast<int>(k / d.nx)));
    }
    if (pts.empty()) fail(Errc::empty_window, "window mask has no cells");
  }
  const auto m = static_cast<Eigen::Index>(fmap.size());
  Eigen::MatrixXd feats(static_cast<Eigen::Index>(pts.size()), m);
  for (std::size_t r = 0; r < pts.size(); ++r) {
    std::vector<double> row = fmap.evaluate(pts[r].x, pts[r].y);
    for (Eigen::Index c = 0; c < m; ++c)
      feats(static_cast<Eigen::Index>(r), c) = row[static_cast<std::size_t>(c)];
  }

  std::vector<double> maxs(S), absmaxs(S), mins(S);
  parallel_for(static_cast<std::size_t>(S), [&](std::size_t slot) {
    Rng rng(seed, stream_index(StreamClass::regression, slot + 1));
    Eigen::VectorXd g(m);
    for (Eigen::Index c = 0; c < m; ++c) g(c) = rng.normal();
    Eigen::VectorXd z = L * g;
    Eigen::VectorXd vals = feats * z;
    maxs[slot] = vals.maxCoeff();
    mins[slot] = vals.minCoeff();
    absmaxs[slot] = vals.cwiseAbs().maxCoeff();
  });

  std::string window_id = corners_only
                              ? "full grid " + std::to_string(d.nx) + "x" + std::to_string(d.ny) +
                                    " (corner cells)"
                              : std::to_string(pts.size()) + " of " + std::to_string(d.nx) + "x" +
                                    std::to_string(d.ny) + " cells";
  return quantile_report_from_sups(std::move(maxs), std::move(absmaxs), std::move(mins), alpha,
                                   seed, std::move(window_id));
}

BinaryMask covariate_region(const FittedModel& model, const FeatureMap& fmap,
                            const GridDomain& domain, double p, double q1,
                            const BinaryMask& window, int sign) {
  return ci_sublevel(predict_field(model, fmap, domain, sign), model.n, p, q1, window);
}

BinaryMask covariate_region(const FittedModel& model, const FeatureMap& fmap,
                            const GridDomain& domain, double p1, double p2, double q2,
                            const BinaryMask& window, int sign) {
  return ci_band(predict_field(model, fmap, domain, sign), model.n, p1, p2, q2, window);
}

int Dataset::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  fail(Errc::bad_input, "dataset has no column \"" + name + "\"");
}

std::vector<double> Dataset::column(const std::string& name) const {
  int idx = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[static_cast<std::size_t>(idx)]);
  return out;
}

std::vector<std::vector<double>> Dataset::select(const std::vector<std::string>& names) const {
  std::vector<int> idx;
  idx.reserve(names.size());
  for (const auto& name : names) idx.push_back(column_index(name));
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    std::vector<double> sel;
    sel.reserve(idx.size());
    for (int i : idx) sel.push_back(row[static_cast<std::size_t>(i)]);
    out.push_back(std::move(sel));
  }
  return out;
}

Dataset read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open CSV file " + path);
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
      std::size_t b = cell.find_first_not_of(" \t\r");
      std::size_t e = cell.find_last_not_of(" \t\r");
      out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return out;
  };
  Dataset data;
  std::string line;
  if (!std::getline(in, line)) fail(Errc::bad_input, "CSV file " + path + " is empty");
  data.columns = split(line);
  if (data.columns.empty()) fail(Errc::bad_input, "CSV header of " + path + " is empty");
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<std::string> cells = split(line);
    if (cells.size() != data.columns.size())
      fail(Errc::bad_input, path + ":" + std::to_string(lineno) + " has " +
                                std::to_string(cells.size()) + " fields, expected " +
                                std::to_string(data.columns.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const std::string& cell : cells) {
      char* end = nullptr;
      double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        fail(Errc::bad_input,
             path + ":" + std::to_string(lineno) + " field \"" + cell + "\" is not a number");
      row.push_back(v);
    }
    data.rows.push_back(std::move(row));
  }
  if (data.rows.empty()) fail(Errc::bad_input, "CSV file " + path + " has no data rows");
  return data;
}

}  // namespace rset
