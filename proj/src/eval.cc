#include "rpg/eval.hh"

namespace rpg::fol {

namespace {

Value ev(const Term& t, Valuation& v, const QuantDomain* dom);

Rat num(const Term& t, Valuation& v, const QuantDomain* dom) {
  Value x = ev(t, v, dom);
  if (x.is_bool) throw EvalError("expected numeric value");
  return x.r;
}
bool bv(const Term& t, Valuation& v, const QuantDomain* dom) {
  Value x = ev(t, v, dom);
  if (!x.is_bool) throw EvalError("expected boolean value");
  return x.b;
}

Value ev(const Term& t, Valuation& v, const QuantDomain* dom) {
  switch (t->kind) {
    case NodeKind::Var: {
      auto it = v.find(t->sym);
      if (it == v.end()) throw EvalError("unassigned variable " + t->sym);
      return it->second;
    }
    case NodeKind::Num:
      return Value::of_rat(t->num);
    case NodeKind::BoolC:
      return Value::of_bool(t->bval);
    case NodeKind::UApp: {
      if (t->args.empty()) {
        auto it = v.find(t->sym);
        if (it == v.end()) throw EvalError("unassigned constant " + t->sym);
        return it->second;
      }
      throw EvalError("cannot evaluate uninterpreted application " + t->sym);
    }
    case NodeKind::Quant: {
      if (!dom || dom->empty()) throw EvalError("quantifier without a bounded domain");
      // enumerate assignments to the binders over the domain
      const auto& binders = t->binders;
      std::vector<size_t> idx(binders.size(), 0);
      auto values_for = [&](const VarDecl& b) -> const std::vector<Rat>& {
        const auto& vals =
            b.sort.kind == SortKind::Int ? dom->int_values : dom->real_values;
        if (vals.empty()) throw EvalError("empty quantifier domain for sort");
        return vals;
      };
      bool is_forall = t->is_forall;
      for (;;) {
        std::vector<std::pair<std::string, std::optional<Value>>> saved;
        for (size_t i = 0; i < binders.size(); ++i) {
          auto old = v.find(binders[i].name);
          saved.push_back({binders[i].name,
                           old == v.end() ? std::nullopt : std::optional<Value>(old->second)});
          v[binders[i].name] = Value::of_rat(values_for(binders[i])[idx[i]]);
        }
        bool body = bv(t->args[0], v, dom);
        for (auto& [name, old] : saved) {
          if (old) v[name] = *old;
          else v.erase(name);
        }
        if (is_forall && !body) return Value::of_bool(false);
        if (!is_forall && body) return Value::of_bool(true);
        // advance odometer
        size_t i = 0;
        for (; i < binders.size(); ++i) {
          if (++idx[i] < values_for(binders[i]).size()) break;
          idx[i] = 0;
        }
        if (i == binders.size()) return Value::of_bool(is_forall);
      }
    }
    case NodeKind::App:
      break;
  }

  switch (t->op) {
    case Op::Add: {
      Rat s(0);
      for (const auto& a : t->args) s = s + num(a, v, dom);
      return Value::of_rat(s);
    }
    case Op::Sub:
      return Value::of_rat(num(t->args[0], v, dom) - num(t->args[1], v, dom));
    case Op::Neg:
      return Value::of_rat(-num(t->args[0], v, dom));
    case Op::MulC:
      return Value::of_rat(num(t->args[0], v, dom) * num(t->args[1], v, dom));
    case Op::DivC: {
      Rat a = num(t->args[0], v, dom), d = num(t->args[1], v, dom);
      if (!a.is_integer() || !d.is_integer()) throw EvalError("div on non-integers");
      return Value::of_rat(Rat(Rat::euclid_div(a.num, d.num)));
    }
    case Op::ModC: {
      Rat a = num(t->args[0], v, dom), d = num(t->args[1], v, dom);
      if (!a.is_integer() || !d.is_integer()) throw EvalError("mod on non-integers");
      return Value::of_rat(Rat(Rat::euclid_mod(a.num, d.num)));
    }
    case Op::Ite:
      return bv(t->args[0], v, dom) ? ev(t->args[1], v, dom) : ev(t->args[2], v, dom);
    case Op::Eq: {
      Value a = ev(t->args[0], v, dom), b = ev(t->args[1], v, dom);
      return Value::of_bool(a == b);
    }
    case Op::Distinct: {
      std::vector<Value> vals;
      for (const auto& a : t->args) vals.push_back(ev(a, v, dom));
      for (size_t i = 0; i < vals.size(); ++i)
        for (size_t j = i + 1; j < vals.size(); ++j)
          if (vals[i] == vals[j]) return Value::of_bool(false);
      return Value::of_bool(true);
    }
    case Op::Le:
      return Value::of_bool(num(t->args[0], v, dom) <= num(t->args[1], v, dom));
    case Op::Lt:
      return Value::of_bool(num(t->args[0], v, dom) < num(t->args[1], v, dom));
    case Op::Ge:
      return Value::of_bool(num(t->args[1], v, dom) <= num(t->args[0], v, dom));
    case Op::Gt:
      return Value::of_bool(num(t->args[1], v, dom) < num(t->args[0], v, dom));
    case Op::Not:
      return Value::of_bool(!bv(t->args[0], v, dom));
    case Op::And: {
      for (const auto& a : t->args)
        if (!bv(a, v, dom)) return Value::of_bool(false);
      return Value::of_bool(true);
    }
    case Op::Or: {
      for (const auto& a : t->args)
        if (bv(a, v, dom)) return Value::of_bool(true);
      return Value::of_bool(false);
    }
    case Op::Implies:
      return Value::of_bool(!bv(t->args[0], v, dom) || bv(t->args[1], v, dom));
  }
  throw EvalError("unhandled term");
}

}  // namespace

Value eval_term(const Term& t, const Valuation& v, const QuantDomain* domain) {
  Valuation scratch = v;
  return ev(t, scratch, domain);
}

bool eval_formula(const Term& t, const Valuation& v, const QuantDomain* domain) {
  Value x = eval_term(t, v, domain);
  if (!x.is_bool) throw EvalError("formula evaluated to non-boolean");
  return x.b;
}

}  // namespace rpg::fol
