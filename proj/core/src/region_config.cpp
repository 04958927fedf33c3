#include "cqrl/errors.hpp"
#include "cqrl/regions.hpp"

namespace cqrl::regions {

EvaluatorKind kind_of(const RegionConfig& cfg) {
  switch (cfg.index()) {
    case 0: return EvaluatorKind::Thm1;
    case 1: return EvaluatorKind::Unstructured;
    case 2: return EvaluatorKind::Thm2;
    default: return EvaluatorKind::Thm3;
  }
}

std::string to_string(EvaluatorKind k) {
  switch (k) {
    case EvaluatorKind::Thm1: return "thm1";
    case EvaluatorKind::Unstructured: return "unstructured";
    case EvaluatorKind::Thm2: return "thm2";
    case EvaluatorKind::Thm3: return "thm3";
  }
  return "?";
}

EvaluatorKind evaluator_from_string(const std::string& s) {
  if (s == "thm1") return EvaluatorKind::Thm1;
  if (s == "unstructured") return EvaluatorKind::Unstructured;
  if (s == "thm2") return EvaluatorKind::Thm2;
  if (s == "thm3") return EvaluatorKind::Thm3;
  throw Error(ErrorKind::ParseError, "unknown evaluator '" + s + "'");
}

RegionReport evaluate(const ChannelSpec& ch, const RegionConfig& cfg, const Rates& rates, const LayeredOptions& opt) {
  switch (cfg.index()) {
    case 0: return thm1_check(ch, std::get<0>(cfg), rates);
    case 1: return unstructured_3to1_check(ch, std::get<1>(cfg), rates);
    case 2: return thm2_feasible(ch, std::get<2>(cfg), rates, opt);
    default: return thm3_feasible(ch, std::get<3>(cfg), rates, opt);
  }
}

void to_json(nlohmann::json& j, const Thm1Config& c) {
  j = {{"evaluator", "thm1"}, {"field", c.field}, {"p_x1", c.p_x1.probs}, {"p_u2", c.p_u2.probs},
       {"p_u3", c.p_u3.probs}, {"f2", c.f2}, {"f3", c.f3}};
}

void to_json(nlohmann::json& j, const UnstructuredPmf& c) {
  j = {{"evaluator", "unstructured"}, {"p_x1", c.p_x1.probs}, {"u2", c.u2}, {"u3", c.u3},
       {"p_u2x2", c.p_u2x2}, {"p_u3x3", c.p_u3x3}};
}

void to_json(nlohmann::json& j, const LayeredConfig& c) {
  auto tx = nlohmann::json::array();
  for (const auto& t : c.tx)
    tx.push_back({{"u_first", t.u_first}, {"u_second", t.u_second}, {"v_first", t.v_first},
                  {"v_second", t.v_second}, {"joint", t.joint}});
  j = {{"tx", std::move(tx)}};
}

nlohmann::json config_to_json(const RegionConfig& c) {
  nlohmann::json j;
  switch (c.index()) {
    case 0: to_json(j, std::get<0>(c)); break;
    case 1: to_json(j, std::get<1>(c)); break;
    case 2: to_json(j, std::get<2>(c).layers); j["evaluator"] = "thm2"; break;
    default: to_json(j, std::get<3>(c).layers); j["evaluator"] = "thm3"; break;
  }
  return j;
}

RegionConfig config_from_json(const nlohmann::json& j) {
  try {
    const auto kind = evaluator_from_string(j.at("evaluator").get<std::string>());
    switch (kind) {
      case EvaluatorKind::Thm1: {
        Thm1Config c;
        c.field = j.at("field").get<int>();
        c.p_x1 = Pmf(j.at("p_x1").get<std::vector<double>>());
        c.p_u2 = Pmf(j.at("p_u2").get<std::vector<double>>());
        c.p_u3 = Pmf(j.at("p_u3").get<std::vector<double>>());
        c.f2 = j.at("f2").get<std::vector<int>>();
        c.f3 = j.at("f3").get<std::vector<int>>();
        return c;
      }
      case EvaluatorKind::Unstructured: {
        UnstructuredPmf c;
        c.p_x1 = Pmf(j.at("p_x1").get<std::vector<double>>());
        c.u2 = j.at("u2").get<int>();
        c.u3 = j.at("u3").get<int>();
        c.p_u2x2 = j.at("p_u2x2").get<std::vector<double>>();
        c.p_u3x3 = j.at("p_u3x3").get<std::vector<double>>();
        return c;
      }
      default: {
        LayeredConfig l;
        const auto& tx = j.at("tx");
        if (!tx.is_array() || tx.size() != 3) throw Error(ErrorKind::ParseError, "tx must list three transmitters");
        for (size_t i = 0; i < 3; ++i) {
          auto& t = l.tx[i];
          t.u_first = tx[i].value("u_first", 1);
          t.u_second = tx[i].value("u_second", 1);
          t.v_first = tx[i].value("v_first", 1);
          t.v_second = tx[i].value("v_second", 1);
          t.joint = tx[i].at("joint").get<std::vector<double>>();
        }
        if (kind == EvaluatorKind::Thm2) return Thm2Config{l};
        return Thm3Config{l};
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("region config: ") + e.what());
  }
}

}  // namespace cqrl::regions
