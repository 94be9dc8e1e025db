// DOM rendering for the three panels. Pure functions of the store state;
// event wiring stays in main.ts.

import { replyBlocks, templateName } from './blocks.js';
import { CELL_W, layoutGraph } from './layout.js';
import type { UiSessionView } from './state.js';
import type { NodeView, TurnView } from './types.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const element = document.createElement(tag);
  if (className) element.className = className;
  if (text !== undefined) element.textContent = text;
  return element;
}

// -- Transcript panel --

function renderTurn(turn: TurnView): HTMLElement {
  const item = el('div', 'turn');
  const user = el('div', 'turn-user');
  user.appendChild(el('span', `mode-chip mode-${turn.mode}`, turn.mode.toUpperCase()));
  if (turn.template_id) {
    user.appendChild(el('span', 'template-badge', templateName(turn.template_id)));
  }
  user.appendChild(el('span', 'turn-prompt', turn.user_prompt));
  item.appendChild(user);

  const reply = el('div', 'turn-reply');
  for (const block of replyBlocks(turn.reply, turn.mode)) {
    const section = el('div', `reply-block block-${block.label.toLowerCase()}`);
    section.appendChild(el('div', 'block-label', block.label));
    section.appendChild(el('div', 'block-text', block.text));
    reply.appendChild(section);
  }
  if (turn.reply.fields.code) {
    const copy = el('button', 'copy-code', 'Copy code to editor');
    copy.dataset.code = turn.reply.fields.code;
    reply.appendChild(copy);
  }
  item.appendChild(reply);
  return item;
}

export function renderTranscript(container: HTMLElement, state: UiSessionView): void {
  container.textContent = '';
  if (state.transcript.length === 0) {
    container.appendChild(el('div', 'placeholder', 'No dialogue on this branch yet.'));
  }
  for (const turn of state.transcript) {
    container.appendChild(renderTurn(turn));
  }
  container.scrollTop = container.scrollHeight;
}

// -- Graph canvas --

function nodeLabel(node: NodeView): string {
  return node.title || (node.kind === 'root' ? 'Root' : node.id);
}

export function renderGraph(container: HTMLElement, state: UiSessionView): void {
  container.textContent = '';
  const layout = layoutGraph({ active_id: state.activeId, nodes: state.nodes });
  const svg = document.createElementNS(SVG_NS, 'svg');
  svg.setAttribute('width', String(Math.max(layout.width, 260)));
  svg.setAttribute('height', String(Math.max(layout.height, 200)));

  const positions = new Map(layout.nodes.map((n) => [n.node.id, n]));
  for (const edge of layout.edges) {
    const from = positions.get(edge.from)!;
    const to = positions.get(edge.to)!;
    const line = document.createElementNS(SVG_NS, 'line');
    line.setAttribute('x1', String(from.x));
    line.setAttribute('y1', String(from.y + 22));
    line.setAttribute('x2', String(to.x));
    line.setAttribute('y2', String(to.y - 22));
    line.setAttribute('class', 'edge');
    svg.appendChild(line);
  }

  for (const placed of layout.nodes) {
    const group = document.createElementNS(SVG_NS, 'g');
    const classes = ['node', `kind-${placed.node.kind}`];
    if (placed.node.id === state.activeId) classes.push('active');
    if (state.selected.includes(placed.node.id)) classes.push('selected');
    group.setAttribute('class', classes.join(' '));
    group.setAttribute('data-node-id', placed.node.id);

    const rect = document.createElementNS(SVG_NS, 'rect');
    rect.setAttribute('x', String(placed.x - CELL_W / 2 + 10));
    rect.setAttribute('y', String(placed.y - 22));
    rect.setAttribute('width', String(CELL_W - 20));
    rect.setAttribute('height', '44');
    rect.setAttribute('rx', '8');
    group.appendChild(rect);

    const title = document.createElementNS(SVG_NS, 'text');
    title.setAttribute('x', String(placed.x));
    title.setAttribute('y', String(placed.y - 2));
    title.setAttribute('text-anchor', 'middle');
    title.textContent = nodeLabel(placed.node).slice(0, 16);
    group.appendChild(title);

    const kind = document.createElementNS(SVG_NS, 'text');
    kind.setAttribute('x', String(placed.x));
    kind.setAttribute('y', String(placed.y + 14));
    kind.setAttribute('text-anchor', 'middle');
    kind.setAttribute('class', 'kind-label');
    kind.textContent = `${placed.node.id} · ${placed.node.kind}`;
    group.appendChild(kind);

    svg.appendChild(group);
  }
  container.appendChild(svg);
}

// -- Toolbar / spark menu --

export function renderToolbar(
  buttons: {
    modify: HTMLButtonElement;
    merge: HTMLButtonElement;
    spark: HTMLButtonElement;
    duplicate: HTMLButtonElement;
    remove: HTMLButtonElement;
    send: HTMLButtonElement;
    collect: HTMLButtonElement;
  },
  state: UiSessionView,
  can: { modify: boolean; merge: boolean; send: boolean },
): void {
  buttons.modify.disabled = !can.modify;
  buttons.spark.disabled = !can.modify;
  buttons.duplicate.disabled = !can.modify;
  buttons.remove.disabled = !can.modify;
  buttons.merge.disabled = !can.merge;
  buttons.send.disabled = !can.send;
  buttons.collect.disabled = state.pending || state.sessionId === null;
}

export function renderSparkMenu(container: HTMLElement, state: UiSessionView): void {
  container.textContent = '';
  if (state.sparkMenuFor === null) {
    container.classList.add('hidden');
    return;
  }
  container.classList.remove('hidden');
  container.appendChild(el('div', 'menu-title', `Spark a transform of node ${state.sparkMenuFor}`));
  for (const spark of state.sparks) {
    const option = el('button', 'spark-option');
    option.dataset.sparkId = spark.id;
    const thumb = el('div', 'spark-thumb');
    thumb.dataset.asset = spark.preview_asset;
    thumb.textContent = spark.label.slice(0, 2);
    option.appendChild(thumb);
    option.appendChild(el('span', 'spark-label', spark.label));
    container.appendChild(option);
  }
  const cancel = el('button', 'spark-cancel', 'Cancel');
  container.appendChild(cancel);
}

// -- Status strip --

export function renderStatus(container: HTMLElement, state: UiSessionView): void {
  const bits: string[] = [];
  if (state.sessionId) bits.push(`session ${state.sessionId}`);
  bits.push(`active node ${state.activeId}`);
  if (state.selected.length) bits.push(`selected: ${state.selected.join(', ')}`);
  if (state.pending) bits.push('working…');
  if (state.lastDecision === 'template_eligible' && state.lastTemplateId) {
    bits.push(`template: ${templateName(state.lastTemplateId)}`);
  }
  container.textContent = bits.join(' | ');
  container.classList.toggle('error', state.lastError !== null);
  if (state.lastError) container.textContent = `error: ${state.lastError}`;
}
