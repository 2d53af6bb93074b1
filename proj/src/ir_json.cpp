#include "flexgc/ir_json.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace flexgc {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidateError(path + ": " + what);
}

const json& need(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) {
    fail(path, std::string("missing key '") + key + "'");
  }
  return j.at(key);
}

std::string need_string(const json& j, const char* key, const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

int64_t need_int(const json& j, const char* key, const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<int64_t>();
}

std::vector<std::string> string_list(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of strings");
  std::vector<std::string> out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) {
      fail(path + "[" + std::to_string(i) + "]", "expected a string");
    }
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

Expr parse_expr(const json& j, const std::string& path);

Place parse_place(const json& j, const std::string& path) {
  std::string tag = need_string(j, "place", path);
  Place p;
  if (tag == "local") {
    p.kind = Place::Kind::Local;
    p.name = need_string(j, "name", path);
  } else if (tag == "global") {
    p.kind = Place::Kind::Global;
    p.name = need_string(j, "name", path);
  } else if (tag == "param") {
    p.kind = Place::Kind::Param;
    p.param_index = static_cast<int>(need_int(j, "index", path));
  } else if (tag == "field") {
    p.kind = Place::Kind::Field;
    p.object = std::make_shared<Expr>(parse_expr(need(j, "object", path),
                                                 path + ".object"));
    p.name = need_string(j, "name", path);
  } else {
    fail(path, "unknown place kind '" + tag + "'");
  }
  return p;
}

Expr parse_expr(const json& j, const std::string& path) {
  std::string tag = need_string(j, "expr", path);
  if (tag == "new") {
    return new_object(need_string(j, "class", path),
                      static_cast<SiteId>(need_int(j, "site", path)));
  }
  if (tag == "null") return null_lit();
  if (tag == "local") return local_read(need_string(j, "name", path));
  if (tag == "global") return global_read(need_string(j, "name", path));
  if (tag == "field") {
    return field_read(parse_expr(need(j, "object", path), path + ".object"),
                      need_string(j, "name", path));
  }
  if (tag == "param") {
    return param_read(static_cast<int>(need_int(j, "index", path)));
  }
  if (tag == "array_read") {
    return array_read(parse_place(need(j, "from", path), path + ".from"),
                      static_cast<int>(need_int(j, "index", path)));
  }
  fail(path, "unknown expression kind '" + tag + "'");
}

Stmt parse_stmt(const json& j, const std::string& path) {
  std::string op = need_string(j, "op", path);
  Stmt s;
  if (op == "assign_local") {
    s.node = AssignLocal{need_string(j, "name", path),
                         parse_expr(need(j, "value", path), path + ".value")};
  } else if (op == "assign_global") {
    s.node = AssignGlobal{need_string(j, "name", path),
                          parse_expr(need(j, "value", path), path + ".value")};
  } else if (op == "assign_field") {
    s.node = AssignField{parse_expr(need(j, "object", path), path + ".object"),
                         need_string(j, "field", path),
                         parse_expr(need(j, "value", path), path + ".value")};
  } else if (op == "array_create") {
    ArrayCreate node;
    node.into = parse_place(need(j, "into", path), path + ".into");
    auto kind = array_kind_from_name(need_string(j, "kind", path));
    if (!kind) fail(path + ".kind", "unknown array kind");
    node.kind = *kind;
    node.site = static_cast<SiteId>(need_int(j, "site", path));
    const json& args = need(j, "args", path);
    if (!args.is_array()) fail(path + ".args", "expected an array of integers");
    for (size_t i = 0; i < args.size(); ++i) {
      if (!args[i].is_number_integer()) {
        fail(path + ".args[" + std::to_string(i) + "]", "expected an integer");
      }
      node.args.push_back(args[i].get<int64_t>());
    }
    s.node = std::move(node);
  } else if (op == "array_extend") {
    s.node = ArrayExtend{parse_place(need(j, "target", path), path + ".target"),
                         parse_expr(need(j, "value", path), path + ".value")};
  } else if (op == "array_prepend") {
    s.node = ArrayPrepend{parse_place(need(j, "target", path), path + ".target"),
                          parse_expr(need(j, "value", path), path + ".value")};
  } else if (op == "array_write") {
    s.node = ArrayWrite{parse_place(need(j, "target", path), path + ".target"),
                        static_cast<int>(need_int(j, "index", path)),
                        parse_expr(need(j, "value", path), path + ".value")};
  } else if (op == "array_remove_last") {
    s.node =
        ArrayRemoveLast{parse_place(need(j, "target", path), path + ".target")};
  } else if (op == "call") {
    Call node;
    node.receiver = parse_expr(need(j, "receiver", path), path + ".receiver");
    node.method = need_string(j, "method", path);
    const json& args = need(j, "args", path);
    if (!args.is_array()) fail(path + ".args", "expected an array");
    for (size_t i = 0; i < args.size(); ++i) {
      node.args.push_back(
          parse_expr(args[i], path + ".args[" + std::to_string(i) + "]"));
    }
    if (j.contains("result") && !j.at("result").is_null()) {
      if (!j.at("result").is_string()) fail(path + ".result", "expected a string");
      node.result_local = j.at("result").get<std::string>();
    }
    s.node = std::move(node);
  } else if (op == "return") {
    s.node = Return{};
  } else {
    fail(path, "unknown statement '" + op + "'");
  }
  return s;
}

json expr_to_json(const Expr& e);

json place_to_json(const Place& p) {
  json j;
  switch (p.kind) {
    case Place::Kind::Local:
      j["place"] = "local";
      j["name"] = p.name;
      break;
    case Place::Kind::Global:
      j["place"] = "global";
      j["name"] = p.name;
      break;
    case Place::Kind::Param:
      j["place"] = "param";
      j["index"] = p.param_index;
      break;
    case Place::Kind::Field:
      j["place"] = "field";
      j["object"] = expr_to_json(*p.object);
      j["name"] = p.name;
      break;
  }
  return j;
}

json expr_to_json(const Expr& e) {
  json j;
  switch (e.kind) {
    case Expr::Kind::NewObject:
      j["expr"] = "new";
      j["class"] = e.name;
      j["site"] = e.site;
      break;
    case Expr::Kind::NullLit:
      j["expr"] = "null";
      break;
    case Expr::Kind::LocalRead:
      j["expr"] = "local";
      j["name"] = e.name;
      break;
    case Expr::Kind::GlobalRead:
      j["expr"] = "global";
      j["name"] = e.name;
      break;
    case Expr::Kind::FieldRead:
      j["expr"] = "field";
      j["object"] = expr_to_json(*e.object);
      j["name"] = e.name;
      break;
    case Expr::Kind::ParamRead:
      j["expr"] = "param";
      j["index"] = e.param_index;
      break;
    case Expr::Kind::ArrayRead:
      j["expr"] = "array_read";
      j["from"] = place_to_json(*e.from);
      j["index"] = e.index;
      break;
  }
  return j;
}

json stmt_to_json(const Stmt& s) {
  json j;
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, AssignLocal>) {
          j["op"] = "assign_local";
          j["name"] = node.name;
          j["value"] = expr_to_json(node.value);
        } else if constexpr (std::is_same_v<T, AssignGlobal>) {
          j["op"] = "assign_global";
          j["name"] = node.name;
          j["value"] = expr_to_json(node.value);
        } else if constexpr (std::is_same_v<T, AssignField>) {
          j["op"] = "assign_field";
          j["object"] = expr_to_json(node.object);
          j["field"] = node.field;
          j["value"] = expr_to_json(node.value);
        } else if constexpr (std::is_same_v<T, ArrayCreate>) {
          j["op"] = "array_create";
          j["into"] = place_to_json(node.into);
          j["kind"] = array_kind_name(node.kind);
          j["site"] = node.site;
          j["args"] = node.args;
        } else if constexpr (std::is_same_v<T, ArrayExtend>) {
          j["op"] = "array_extend";
          j["target"] = place_to_json(node.target);
          j["value"] = expr_to_json(node.value);
        } else if constexpr (std::is_same_v<T, ArrayPrepend>) {
          j["op"] = "array_prepend";
          j["target"] = place_to_json(node.target);
          j["value"] = expr_to_json(node.value);
        } else if constexpr (std::is_same_v<T, ArrayWrite>) {
          j["op"] = "array_write";
          j["target"] = place_to_json(node.target);
          j["index"] = node.index;
          j["value"] = expr_to_json(node.value);
        } else if constexpr (std::is_same_v<T, ArrayRemoveLast>) {
          j["op"] = "array_remove_last";
          j["target"] = place_to_json(node.target);
        } else if constexpr (std::is_same_v<T, Call>) {
          j["op"] = "call";
          j["receiver"] = expr_to_json(node.receiver);
          j["method"] = node.method;
          json args = json::array();
          for (const auto& a : node.args) args.push_back(expr_to_json(a));
          j["args"] = std::move(args);
          if (node.result_local) j["result"] = *node.result_local;
        } else if constexpr (std::is_same_v<T, Return>) {
          j["op"] = "return";
        }
      },
      s.node);
  return j;
}

}  // namespace

Program parse_program(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidateError(std::string("document: ") + e.what());
  }
  if (!doc.is_object()) fail("document", "top level must be an object");
  if (doc.contains("version")) {
    if (!doc.at("version").is_number_integer() ||
        doc.at("version").get<int>() != 1) {
      fail("version", "unsupported document version");
    }
  }

  Program p;
  const json& classes = need(doc, "classes", "document");
  if (!classes.is_array()) fail("classes", "expected an array");
  for (size_t ci = 0; ci < classes.size(); ++ci) {
    const json& jc = classes[ci];
    std::string cpath = "classes[" + std::to_string(ci) + "]";
    ClassDecl cls;
    cls.name = need_string(jc, "name", cpath);
    if (jc.contains("parent") && !jc.at("parent").is_null()) {
      if (!jc.at("parent").is_string()) fail(cpath + ".parent", "expected a string");
      cls.parent = jc.at("parent").get<std::string>();
    }
    if (jc.contains("fields")) {
      cls.fields = string_list(jc.at("fields"), cpath + ".fields");
    }
    if (jc.contains("methods")) {
      const json& methods = jc.at("methods");
      if (!methods.is_array()) fail(cpath + ".methods", "expected an array");
      for (size_t mi = 0; mi < methods.size(); ++mi) {
        const json& jm = methods[mi];
        std::string mpath = cpath + ".methods[" + std::to_string(mi) + "]";
        Method m;
        m.name = need_string(jm, "name", mpath);
        if (jm.contains("params")) {
          m.params = string_list(jm.at("params"), mpath + ".params");
        }
        if (jm.contains("locals")) {
          m.locals = string_list(jm.at("locals"), mpath + ".locals");
        }
        if (jm.contains("body")) {
          const json& body = jm.at("body");
          if (!body.is_array()) fail(mpath + ".body", "expected an array");
          for (size_t si = 0; si < body.size(); ++si) {
            m.body.push_back(
                parse_stmt(body[si], mpath + ".body[" + std::to_string(si) + "]"));
          }
        }
        if (jm.contains("return") && !jm.at("return").is_null()) {
          m.return_expr = parse_expr(jm.at("return"), mpath + ".return");
        }
        cls.methods.push_back(std::move(m));
      }
    }
    p.classes.push_back(std::move(cls));
  }

  if (doc.contains("globals")) {
    p.globals = string_list(doc.at("globals"), "globals");
  }

  std::string entry = need_string(doc, "entry", "document");
  auto dot = entry.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == entry.size()) {
    fail("entry", "expected 'CLASS.method', got '" + entry + "'");
  }
  p.entry_class = entry.substr(0, dot);
  p.entry_method = entry.substr(dot + 1);

  assign_stmt_uids(p);
  ProgramIndex validate(p);  // throws on any remaining problem
  return p;
}

Program parse_program_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidateError("cannot open program file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_program(buf.str());
}

std::string program_to_json(const Program& program) {
  json doc;
  doc["version"] = 1;
  json classes = json::array();
  for (const auto& cls : program.classes) {
    json jc;
    jc["name"] = cls.name;
    if (cls.parent) {
      jc["parent"] = *cls.parent;
    } else {
      jc["parent"] = nullptr;
    }
    jc["fields"] = cls.fields;
    json methods = json::array();
    for (const auto& m : cls.methods) {
      json jm;
      jm["name"] = m.name;
      jm["params"] = m.params;
      jm["locals"] = m.locals;
      json body = json::array();
      for (const auto& s : m.body) body.push_back(stmt_to_json(s));
      jm["body"] = std::move(body);
      if (m.return_expr) jm["return"] = expr_to_json(*m.return_expr);
      methods.push_back(std::move(jm));
    }
    jc["methods"] = std::move(methods);
    classes.push_back(std::move(jc));
  }
  doc["classes"] = std::move(classes);
  doc["globals"] = program.globals;
  doc["entry"] = program.entry_class + "." + program.entry_method;
  return doc.dump(2) + "\n";
}

}  // namespace flexgc
