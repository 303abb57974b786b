//! Minimal arena DOM fed by html5ever.
//!
//! Only what the linearizer walks is kept: elements with their attributes,
//! text, and tree structure. Comments, doctypes and processing instructions
//! become inert nodes so the tree builder's bookkeeping stays consistent.

use std::borrow::Cow;
use std::collections::HashMap;

use html5ever::tendril::{StrTendril, TendrilSink};
use html5ever::tree_builder::{ElementFlags, NodeOrText, QuirksMode, TreeSink};
use html5ever::{parse_document, Attribute, ExpandedName, ParseOpts, QualName};

pub type NodeId = usize;

#[derive(Debug, Clone)]
pub enum NodeData {
    Document,
    Element { name: QualName, attrs: Vec<(String, String)> },
    Text(String),
    Inert,
}

#[derive(Debug, Clone)]
pub struct Node {
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub data: NodeData,
}

#[derive(Debug, Clone)]
pub struct Document {
    nodes: Vec<Node>,
}

pub const ROOT: NodeId = 0;

impl Document {
    pub fn parse(html: &str) -> Document {
        parse_document(Sink::default(), ParseOpts::default()).one(StrTendril::from(html))
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id].children
    }

    /// Lowercase local name for elements, `None` otherwise.
    pub fn tag(&self, id: NodeId) -> Option<&str> {
        match &self.nodes[id].data {
            NodeData::Element { name, .. } => Some(&name.local),
            _ => None,
        }
    }

    pub fn attr(&self, id: NodeId, key: &str) -> Option<&str> {
        match &self.nodes[id].data {
            NodeData::Element { attrs, .. } => attrs
                .iter()
                .find(|(k, _)| k.eq_ignore_ascii_case(key))
                .map(|(_, v)| v.as_str()),
            _ => None,
        }
    }

    pub fn has_class(&self, id: NodeId, class: &str) -> bool {
        self.attr(id, "class")
            .map(|c| c.split_ascii_whitespace().any(|c| c == class))
            .unwrap_or(false)
    }

    /// Pre-order traversal of the subtree rooted at `id`, including `id`.
    pub fn descendants(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(self.nodes[n].children.iter().rev());
        }
        out
    }

    pub fn find_first(&self, from: NodeId, pred: impl Fn(NodeId) -> bool) -> Option<NodeId> {
        self.descendants(from).into_iter().find(|&n| pred(n))
    }

    pub fn ancestors(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        std::iter::successors(self.nodes[id].parent, move |&p| self.nodes[p].parent)
    }

    /// Concatenated text of the subtree, skipping script and style content.
    pub fn text_content(&self, id: NodeId) -> String {
        let mut out = String::new();
        self.collect_text(id, &mut out);
        out
    }

    fn collect_text(&self, id: NodeId, out: &mut String) {
        match &self.nodes[id].data {
            NodeData::Text(t) => out.push_str(t),
            NodeData::Element { name, .. } if is_skipped(&name.local) => {}
            _ => {
                for &c in &self.nodes[id].children {
                    self.collect_text(c, out);
                }
            }
        }
    }
}

pub fn is_skipped(tag: &str) -> bool {
    matches!(tag, "script" | "style" | "noscript" | "template" | "head" | "title")
}

#[derive(Default)]
struct Sink {
    nodes: Vec<Node>,
    templates: HashMap<NodeId, NodeId>,
}

impl Sink {
    fn new_node(&mut self, data: NodeData) -> NodeId {
        self.ensure_root();
        self.nodes.push(Node { parent: None, children: Vec::new(), data });
        self.nodes.len() - 1
    }

    fn ensure_root(&mut self) {
        if self.nodes.is_empty() {
            self.nodes.push(Node { parent: None, children: Vec::new(), data: NodeData::Document });
        }
    }

    fn detach(&mut self, id: NodeId) {
        if let Some(p) = self.nodes[id].parent.take() {
            self.nodes[p].children.retain(|&c| c != id);
        }
    }

    fn insert_at(&mut self, parent: NodeId, index: usize, child: NodeOrText<NodeId>) {
        match child {
            NodeOrText::AppendText(text) => {
                // merge with the preceding text sibling
                if index > 0 {
                    let prev = self.nodes[parent].children[index - 1];
                    if let NodeData::Text(t) = &mut self.nodes[prev].data {
                        t.push_str(&text);
                        return;
                    }
                }
                let id = self.new_node(NodeData::Text(text.to_string()));
                self.nodes[id].parent = Some(parent);
                self.nodes[parent].children.insert(index, id);
            }
            NodeOrText::AppendNode(id) => {
                self.detach(id);
                self.nodes[id].parent = Some(parent);
                let index = index.min(self.nodes[parent].children.len());
                self.nodes[parent].children.insert(index, id);
            }
        }
    }
}

impl TreeSink for Sink {
    type Handle = NodeId;
    type Output = Document;

    fn finish(mut self) -> Document {
        self.ensure_root();
        Document { nodes: self.nodes }
    }

    fn parse_error(&mut self, _msg: Cow<'static, str>) {}

    fn get_document(&mut self) -> NodeId {
        self.ensure_root();
        ROOT
    }

    fn elem_name<'a>(&'a self, target: &'a NodeId) -> ExpandedName<'a> {
        match &self.nodes[*target].data {
            NodeData::Element { name, .. } => name.expanded(),
            _ => panic!("elem_name on a non-element node"),
        }
    }

    fn create_element(&mut self, name: QualName, attrs: Vec<Attribute>, flags: ElementFlags) -> NodeId {
        let attrs = attrs
            .into_iter()
            .map(|a| (a.name.local.to_string(), a.value.to_string()))
            .collect();
        let id = self.new_node(NodeData::Element { name, attrs });
        if flags.template {
            let contents = self.new_node(NodeData::Document);
            self.templates.insert(id, contents);
        }
        id
    }

    fn create_comment(&mut self, _text: StrTendril) -> NodeId {
        self.new_node(NodeData::Inert)
    }

    fn create_pi(&mut self, _target: StrTendril, _data: StrTendril) -> NodeId {
        self.new_node(NodeData::Inert)
    }

    fn append(&mut self, parent: &NodeId, child: NodeOrText<NodeId>) {
        let len = self.nodes[*parent].children.len();
        self.insert_at(*parent, len, child);
    }

    fn append_based_on_parent_node(
        &mut self,
        element: &NodeId,
        prev_element: &NodeId,
        child: NodeOrText<NodeId>,
    ) {
        if self.nodes[*element].parent.is_some() {
            self.append_before_sibling(element, child);
        } else {
            self.append(prev_element, child);
        }
    }

    fn append_doctype_to_document(&mut self, _name: StrTendril, _public: StrTendril, _system: StrTendril) {}

    fn get_template_contents(&mut self, target: &NodeId) -> NodeId {
        self.templates[target]
    }

    fn same_node(&self, x: &NodeId, y: &NodeId) -> bool {
        x == y
    }

    fn set_quirks_mode(&mut self, _mode: QuirksMode) {}

    fn append_before_sibling(&mut self, sibling: &NodeId, new_node: NodeOrText<NodeId>) {
        let parent = match self.nodes[*sibling].parent {
            Some(p) => p,
            None => return,
        };
        if let NodeOrText::AppendNode(id) = &new_node {
            self.detach(*id);
        }
        let index = self.nodes[parent]
            .children
            .iter()
            .position(|c| c == sibling)
            .expect("sibling is a child of its parent");
        self.insert_at(parent, index, new_node);
    }

    fn add_attrs_if_missing(&mut self, target: &NodeId, new: Vec<Attribute>) {
        if let NodeData::Element { attrs, .. } = &mut self.nodes[*target].data {
            for a in new {
                let key = a.name.local.to_string();
                if !attrs.iter().any(|(k, _)| *k == key) {
                    attrs.push((key, a.value.to_string()));
                }
            }
        }
    }

    fn remove_from_parent(&mut self, target: &NodeId) {
        self.detach(*target);
    }

    fn reparent_children(&mut self, node: &NodeId, new_parent: &NodeId) {
        let moved = std::mem::take(&mut self.nodes[*node].children);
        for &c in &moved {
            self.nodes[c].parent = Some(*new_parent);
        }
        self.nodes[*new_parent].children.extend(moved);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fragment_into_body() {
        let doc = Document::parse("<div class='poem'>a<br>b</div>");
        let body = doc.find_first(ROOT, |n| doc.tag(n) == Some("body")).unwrap();
        let div = doc.children(body)[0];
        assert_eq!(doc.tag(div), Some("div"));
        assert!(doc.has_class(div, "poem"));
        assert_eq!(doc.text_content(div), "ab");
        assert_eq!(doc.children(div).len(), 3);
    }

    #[test]
    fn adjacent_text_merges() {
        let doc = Document::parse("<p>a&amp;b</p>");
        let p = doc.find_first(ROOT, |n| doc.tag(n) == Some("p")).unwrap();
        assert_eq!(doc.children(p).len(), 1);
        assert_eq!(doc.text_content(p), "a&b");
    }

    #[test]
    fn skips_script_text() {
        let doc = Document::parse("<p>a<script>var x;</script>b</p>");
        let p = doc.find_first(ROOT, |n| doc.tag(n) == Some("p")).unwrap();
        assert_eq!(doc.text_content(p), "ab");
    }

    #[test]
    fn misnested_table_text_is_kept() {
        // foster parenting exercises append_before_sibling
        let doc = Document::parse("<table>x<tr><td>y</td></tr></table>");
        assert_eq!(doc.text_content(ROOT), "xy");
    }
}
