use std::collections::{BTreeMap, HashMap};

use crate::graph::Vertex;

/// Read access to a possibly partial function on vertices.
pub trait VertexValues {
    fn value(&self, x: Vertex) -> Option<f64>;
}

impl VertexValues for [f64] {
    fn value(&self, x: Vertex) -> Option<f64> {
        self.get(x).copied()
    }
}

impl VertexValues for Vec<f64> {
    fn value(&self, x: Vertex) -> Option<f64> {
        self.get(x).copied()
    }
}

impl VertexValues for [Option<f64>] {
    fn value(&self, x: Vertex) -> Option<f64> {
        self.get(x).copied().flatten()
    }
}

impl VertexValues for Vec<Option<f64>> {
    fn value(&self, x: Vertex) -> Option<f64> {
        self.get(x).copied().flatten()
    }
}

impl VertexValues for HashMap<Vertex, f64> {
    fn value(&self, x: Vertex) -> Option<f64> {
        self.get(&x).copied()
    }
}

impl VertexValues for BTreeMap<Vertex, f64> {
    fn value(&self, x: Vertex) -> Option<f64> {
        self.get(&x).copied()
    }
}

impl<T: VertexValues + ?Sized> VertexValues for &T {
    fn value(&self, x: Vertex) -> Option<f64> {
        (**self).value(x)
    }
}
