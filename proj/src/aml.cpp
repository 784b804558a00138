#include "bipan/aml.hpp"

#include <expat.h>

#include <algorithm>
#include <charconv>
#include <memory>
#include <set>

#include "bipan/error.hpp"

namespace bipan {

namespace {

constexpr std::string_view kCaexNamespace = "http://www.dke.de/CAEX";
constexpr char kNamespaceSeparator = '|';

struct XmlElement {
  std::string ns;
  std::string name;
  std::map<std::string, std::string> attributes;
  std::string text;
  long line = 0;
  std::vector<std::unique_ptr<XmlElement>> children;

  const std::string* attribute(const std::string& key) const {
    auto it = attributes.find(key);
    return it == attributes.end() ? nullptr : &it->second;
  }
};

std::pair<std::string, std::string> split_name(const char* raw) {
  std::string_view full(raw);
  auto pos = full.rfind(kNamespaceSeparator);
  if (pos == std::string_view::npos) return {"", std::string(full)};
  return {std::string(full.substr(0, pos)), std::string(full.substr(pos + 1))};
}

class DomBuilder {
 public:
  std::unique_ptr<XmlElement> parse(std::string_view bytes) {
    std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(
        XML_ParserCreateNS(nullptr, kNamespaceSeparator), &XML_ParserFree);
    if (!parser) throw Error("xml-parse-error", "cannot create XML parser");
    parser_ = parser.get();
    XML_SetUserData(parser_, this);
    XML_SetElementHandler(parser_, &DomBuilder::on_start, &DomBuilder::on_end);
    XML_SetCharacterDataHandler(parser_, &DomBuilder::on_text);
    if (XML_Parse(parser_, bytes.data(), static_cast<int>(bytes.size()), XML_TRUE) == XML_STATUS_ERROR) {
      throw Error("xml-parse-error", "line " + std::to_string(XML_GetCurrentLineNumber(parser_)) + ", column " +
                                         std::to_string(XML_GetCurrentColumnNumber(parser_) + 1) + ": " +
                                         XML_ErrorString(XML_GetErrorCode(parser_)));
    }
    if (!root_) throw Error("xml-parse-error", "document has no root element");
    return std::move(root_);
  }

 private:
  static void XMLCALL on_start(void* self_ptr, const XML_Char* name, const XML_Char** attrs) {
    auto* self = static_cast<DomBuilder*>(self_ptr);
    auto element = std::make_unique<XmlElement>();
    std::tie(element->ns, element->name) = split_name(name);
    element->line = static_cast<long>(XML_GetCurrentLineNumber(self->parser_));
    for (std::size_t i = 0; attrs[i] != nullptr; i += 2) {
      element->attributes[split_name(attrs[i]).second] = attrs[i + 1];
    }
    XmlElement* raw = element.get();
    if (self->stack_.empty()) {
      self->root_ = std::move(element);
    } else {
      self->stack_.back()->children.push_back(std::move(element));
    }
    self->stack_.push_back(raw);
  }

  static void XMLCALL on_end(void* self_ptr, const XML_Char*) { static_cast<DomBuilder*>(self_ptr)->stack_.pop_back(); }

  static void XMLCALL on_text(void* self_ptr, const XML_Char* text, int length) {
    auto* self = static_cast<DomBuilder*>(self_ptr);
    if (!self->stack_.empty()) self->stack_.back()->text.append(text, static_cast<std::size_t>(length));
  }

  XML_Parser parser_ = nullptr;
  std::unique_ptr<XmlElement> root_;
  std::vector<XmlElement*> stack_;
};

std::string trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

class CaexReader {
 public:
  AmlFragment read(const XmlElement& root) {
    if (root.name != "CAEXFile" || !(root.ns.empty() || root.ns.starts_with(kCaexNamespace))) {
      throw Error("unsupported-root", "expected CAEXFile, found " + (root.ns.empty() ? "" : "{" + root.ns + "}") +
                                          root.name + " at line " + std::to_string(root.line));
    }
    if (const auto* version = root.attribute("SchemaVersion")) {
      if (!version->starts_with("2.") && !version->starts_with("3.")) {
        throw Error("unsupported-root", "CAEX schema version " + *version + " is not 2.x or 3.x");
      }
    }
    ns_ = root.ns;

    const std::string path = "/CAEXFile";
    for (const auto* lib : children(root, "SystemUnitClassLib")) {
      const auto lib_path = path + "/" + describe(*lib);
      for (const auto* cls : children(*lib, "SystemUnitClass")) {
        const auto cls_path = lib_path + "/" + describe(*cls);
        for (const auto* element : children(*cls, "InternalElement")) read_element(*element, cls_path, nullptr);
      }
    }
    return std::move(fragment_);
  }

 private:
  std::vector<const XmlElement*> children(const XmlElement& parent, std::string_view name) const {
    std::vector<const XmlElement*> out;
    for (const auto& child : parent.children) {
      if (child->name == name && child->ns == ns_) out.push_back(child.get());
    }
    return out;
  }

  static std::string describe(const XmlElement& element) {
    const auto* name = element.attribute("Name");
    return element.name + (name ? "[@Name='" + *name + "']" : "");
  }

  static std::string located(const std::string& path, const XmlElement& element) {
    return path + " (line " + std::to_string(element.line) + ")";
  }

  std::string value_of(const XmlElement& attribute) const {
    auto values = children(attribute, "Value");
    return values.empty() ? std::string() : trim(values.front()->text);
  }

  void read_element(const XmlElement& element, const std::string& parent_path, const NodeId* parent) {
    const auto path = parent_path + "/" + describe(element);
    const auto* id_text = element.attribute("ID");
    if (id_text == nullptr) throw Error("xml-parse-error", located(path, element) + ": InternalElement without ID");
    if (!NodeId::is_valid(*id_text)) {
      throw Error("xml-parse-error", located(path, element) + ": ID '" + *id_text + "' is not a valid node id");
    }

    FragmentProduct product;
    product.id = NodeId(*id_text);
    if (!seen_.insert(product.id).second) throw Error("duplicate-id", product.id.str() + " at " + located(path, element));
    if (const auto* name = element.attribute("Name")) product.label = *name;

    for (const auto* attribute : children(element, "Attribute")) {
      const auto* name = attribute->attribute("Name");
      if (name == nullptr) throw Error("xml-parse-error", located(path + "/Attribute", *attribute) + ": missing Name");
      if (*name == "Position") {
        product.position = read_position(*attribute, path + "/" + describe(*attribute));
      } else if (*name == "BiPanKind") {
        auto text = value_of(*attribute);
        auto kind = parse_product_kind(text);
        if (!kind) {
          throw Error("xml-parse-error",
                      located(path + "/" + describe(*attribute), *attribute) + ": unknown kind '" + text + "'");
        }
        product.kind = kind;
      } else {
        read_attribute(*attribute, *name, product.attributes);
      }
    }
    if (parent != nullptr) product.attributes["parent"] = parent->str();

    const NodeId self = product.id;
    fragment_.products.push_back(std::move(product));
    for (const auto* child : children(element, "InternalElement")) read_element(*child, path, &self);
  }

  void read_attribute(const XmlElement& attribute, const std::string& key,
                      std::map<std::string, std::string>& out) const {
    auto values = children(attribute, "Value");
    if (!values.empty()) out[key] = trim(values.front()->text);
    for (const auto* nested : children(attribute, "Attribute")) {
      if (const auto* name = nested->attribute("Name")) read_attribute(*nested, key + "." + *name, out);
    }
  }

  Position read_position(const XmlElement& attribute, const std::string& path) const {
    auto coordinate = [&](std::string_view axis) {
      for (const auto* nested : children(attribute, "Attribute")) {
        const auto* name = nested->attribute("Name");
        if (name == nullptr || *name != axis) continue;
        auto text = value_of(*nested);
        double value = 0.0;
        auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (text.empty() || ec != std::errc() || end != text.data() + text.size()) {
          throw Error("non-numeric-position",
                      located(path, *nested) + ": " + std::string(axis) + " = '" + text + "'");
        }
        return value;
      }
      throw Error("non-numeric-position", located(path, attribute) + ": missing " + std::string(axis));
    };
    return Position{coordinate("x"), coordinate("y"), coordinate("z")};
  }

  std::string ns_;
  std::set<NodeId> seen_;
  AmlFragment fragment_;
};

}  // namespace

const FragmentProduct* AmlFragment::find(const NodeId& id) const {
  auto it = std::find_if(products.begin(), products.end(), [&](const FragmentProduct& p) { return p.id == id; });
  return it == products.end() ? nullptr : &*it;
}

AmlFragment import_aml(std::string_view bytes) {
  auto root = DomBuilder().parse(bytes);
  return CaexReader().read(*root);
}

BiPanModel merge(const AmlFragment& fragment, const BiPanModel& model) {
  ModelData data = model.data();
  std::vector<NodeId> kind_conflicts;
  std::vector<NodeId> label_conflicts;

  for (const auto& incoming : fragment.products) {
    auto cls = model.class_of(incoming.id);
    if (cls && *cls != NodeClass::Product) {
      throw Error("duplicate-id", incoming.id.str() + " is already a process or skill");
    }
    auto existing = std::find_if(data.products.begin(), data.products.end(),
                                 [&](const ProductNode& p) { return p.id == incoming.id; });
    if (existing == data.products.end()) {
      ProductNode node;
      node.id = incoming.id;
      node.label = incoming.label.value_or(incoming.id.str());
      node.kind = incoming.kind.value_or(ProductKind::Elementary);
      node.position = incoming.position;
      node.attributes = incoming.attributes;
      data.products.push_back(std::move(node));
      continue;
    }
    if (incoming.kind && *incoming.kind != existing->kind) kind_conflicts.push_back(incoming.id);
    if (incoming.label && *incoming.label != existing->label) label_conflicts.push_back(incoming.id);
    if (incoming.position) existing->position = incoming.position;
    for (const auto& [key, value] : incoming.attributes) existing->attributes[key] = value;
  }

  if (!kind_conflicts.empty()) throw Error("kind-conflict", join(kind_conflicts));
  if (!label_conflicts.empty()) throw Error("label-conflict", join(label_conflicts));
  return BiPanModel(std::move(data));
}

}  // namespace bipan
