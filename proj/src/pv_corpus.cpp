#include "holofg/pv_corpus.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace holofg {

namespace {

Beta parse_beta(const nlohmann::json& j, int dim) {
  if (j.is_string()) return Beta::builtin(j.get<std::string>(), dim);
  if (!j.is_array()) throw std::runtime_error("pv corpus: beta must be a builtin name or a term table");
  std::vector<PolyTerm> terms;
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 4) throw std::runtime_error("pv corpus: term must be [re, im, a, b]");
    PolyTerm p{cplx(t[0].get<double>(), t[1].get<double>()), t[2].get<std::vector<int>>(),
               t[3].get<std::vector<int>>()};
    if (static_cast<int>(p.a.size()) != dim || static_cast<int>(p.b.size()) != dim)
      throw std::runtime_error("pv corpus: term exponents must have m + n entries");
    terms.push_back(std::move(p));
  }
  return Beta::from_polynomial(std::move(terms), "table");
}

}  // namespace

std::vector<PVCorpusCase> parse_pv_corpus(const std::string& json_text) {
  std::vector<PVCorpusCase> out;
  try {
    const auto doc = nlohmann::json::parse(json_text);
    for (const auto& c : doc.at("cases")) {
      PVCorpusCase pc;
      pc.name = c.at("name").get<std::string>();
      auto& in = pc.integrand;
      in.m = c.at("m").get<int>();
      in.n = c.value("n", 0);
      in.pole = c.at("i").get<std::vector<int>>();
      in.logs = c.at("k").get<std::vector<int>>();
      in.beta = parse_beta(c.at("beta"), in.m + in.n);
      if (c.contains("expected")) {
        const auto e = c.at("expected").get<std::vector<double>>();
        if (e.size() != 2) throw std::runtime_error("pv corpus: expected must be [re, im]");
        pc.expected = cplx(e[0], e[1]);
      }
      pc.provenance = c.value("provenance", "");
      in.validate();
      out.push_back(std::move(pc));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("pv corpus: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("pv corpus: ") + e.what());
  }
  return out;
}

std::vector<PVCorpusCase> load_pv_corpus(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_pv_corpus(ss.str());
}

}  // namespace holofg
