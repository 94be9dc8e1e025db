// Layered layout for the version-graph canvas. Depth is the longest path
// from the root, columns are assigned per layer in creation order, so the
// same graph always lays out the same way.

import type { GraphView, NodeView } from './types.js';

export interface LayoutNode {
  node: NodeView;
  x: number;
  y: number;
}

export interface LayoutEdge {
  from: string;
  to: string;
}

export interface GraphLayout {
  nodes: LayoutNode[];
  edges: LayoutEdge[];
  width: number;
  height: number;
}

export const CELL_W = 130;
export const CELL_H = 92;

export function depthsOf(nodes: NodeView[]): Map<string, number> {
  const depths = new Map<string, number>();
  // Parents always predate children, so creation order is topological.
  const ordered = [...nodes].sort((a, b) => Number(a.id) - Number(b.id));
  for (const node of ordered) {
    const parentDepths = node.parent_ids.map((p) => depths.get(p) ?? 0);
    depths.set(node.id, node.parent_ids.length ? Math.max(...parentDepths) + 1 : 0);
  }
  return depths;
}

export function adjacencyOf(nodes: NodeView[]): Record<string, string[]> {
  const adjacency: Record<string, string[]> = {};
  for (const node of nodes) {
    adjacency[node.id] = [...node.parent_ids];
  }
  return adjacency;
}

export function layoutGraph(graph: GraphView): GraphLayout {
  const depths = depthsOf(graph.nodes);
  const ordered = [...graph.nodes].sort((a, b) => Number(a.id) - Number(b.id));
  const columns = new Map<number, number>();
  const nodes: LayoutNode[] = [];
  for (const node of ordered) {
    const depth = depths.get(node.id)!;
    const column = columns.get(depth) ?? 0;
    columns.set(depth, column + 1);
    nodes.push({
      node,
      x: column * CELL_W + CELL_W / 2,
      y: depth * CELL_H + CELL_H / 2,
    });
  }
  const edges: LayoutEdge[] = [];
  for (const node of ordered) {
    for (const pid of node.parent_ids) {
      edges.push({ from: pid, to: node.id });
    }
  }
  const maxColumn = Math.max(1, ...[...columns.values()]);
  const maxDepth = Math.max(0, ...[...depths.values()]);
  return {
    nodes,
    edges,
    width: maxColumn * CELL_W,
    height: (maxDepth + 1) * CELL_H,
  };
}
