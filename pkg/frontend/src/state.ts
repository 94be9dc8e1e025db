// UI session store: one source of truth for the three panels.
//
// All server interaction happens through the ApiClient actions below; the
// store enforces the selection invariants (at most two selected nodes,
// merge only with exactly two, modify/spark only with exactly one) and the
// single-in-flight-mutation rule via the `pending` flag.

import { ApiClient, ApiError } from './api.js';
import type { Mode, NodeView, SparkView, TurnView } from './types.js';

export interface UiSessionView {
  sessionId: string | null;
  nodes: NodeView[];
  activeId: string;
  transcript: TurnView[];
  editorCode: string;
  pending: boolean;
  selected: string[];
  mode: Mode;
  sparks: SparkView[];
  sparkMenuFor: string | null;
  lastError: string | null;
  lastDecision: string | null;
  lastTemplateId: string | null;
}

type Listener = (state: UiSessionView) => void;

export class SessionStore {
  state: UiSessionView = {
    sessionId: null,
    nodes: [],
    activeId: '0',
    transcript: [],
    editorCode: '',
    pending: false,
    selected: [],
    mode: 'general',
    sparks: [],
    sparkMenuFor: null,
    lastError: null,
    lastDecision: null,
    lastTemplateId: null,
  };

  private listeners: Listener[] = [];

  constructor(readonly api: ApiClient) {}

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  // -- Selection invariants --

  canSend(): boolean {
    return this.state.sessionId !== null && !this.state.pending;
  }

  canModify(): boolean {
    return this.state.selected.length === 1 && !this.state.pending;
  }

  canMerge(): boolean {
    return this.state.selected.length === 2 && !this.state.pending;
  }

  toggleSelect(nodeId: string): void {
    const selected = [...this.state.selected];
    const index = selected.indexOf(nodeId);
    if (index >= 0) {
      selected.splice(index, 1);
    } else {
      selected.push(nodeId);
      while (selected.length > 2) selected.shift();
    }
    this.state = { ...this.state, selected };
    this.emit();
  }

  setMode(mode: Mode): void {
    this.state = { ...this.state, mode };
    this.emit();
  }

  setEditorCode(code: string): void {
    this.state = { ...this.state, editorCode: code };
    this.emit();
  }

  openSparkMenu(nodeId: string): void {
    this.state = { ...this.state, sparkMenuFor: nodeId };
    this.emit();
  }

  closeSparkMenu(): void {
    this.state = { ...this.state, sparkMenuFor: null };
    this.emit();
  }

  // -- Server actions --

  private async mutate<T>(action: () => Promise<T>): Promise<T | null> {
    if (this.state.pending) return null;
    this.state = { ...this.state, pending: true, lastError: null };
    this.emit();
    try {
      return await action();
    } catch (error) {
      const message = error instanceof ApiError ? error.message : String(error);
      this.state = { ...this.state, lastError: message };
      return null;
    } finally {
      this.state = { ...this.state, pending: false };
      this.emit();
    }
  }

  async init(): Promise<void> {
    await this.mutate(async () => {
      const doc = await this.api.createSession();
      const sparks = (await this.api.sparks()).sparks;
      this.state = { ...this.state, sessionId: doc.session_id, sparks };
      await this.syncTo(doc.active_id);
    });
  }

  private sid(): string {
    if (this.state.sessionId === null) throw new Error('no session yet');
    return this.state.sessionId;
  }

  /** Re-sync graph, transcript, and editor to one node (activating it). */
  private async syncTo(nodeId: string): Promise<void> {
    const activated = await this.api.activate(this.sid(), nodeId);
    const graph = await this.api.getGraph(this.sid());
    this.state = {
      ...this.state,
      nodes: graph.nodes,
      activeId: graph.active_id,
      transcript: activated.history,
      editorCode: activated.code,
    };
  }

  async clickNode(nodeId: string): Promise<void> {
    await this.mutate(() => this.syncTo(nodeId));
  }

  async sendTurn(prompt: string): Promise<void> {
    await this.mutate(async () => {
      const response = await this.api.postTurn(this.sid(), this.state.mode, prompt);
      this.state = {
        ...this.state,
        lastDecision: response.decision,
        lastTemplateId: response.template_id ?? null,
      };
      await this.syncTo(this.state.activeId);
    });
  }

  async collectEditor(title: string): Promise<void> {
    await this.mutate(async () => {
      const result = await this.api.collect(this.sid(), this.state.editorCode, title);
      await this.syncTo(result.node.id);
    });
  }

  async modifySelected(instruction: string): Promise<void> {
    if (!this.canModify()) return;
    const [target] = this.state.selected;
    await this.mutate(async () => {
      const result = await this.api.modify(this.sid(), target, instruction);
      this.state = { ...this.state, selected: [] };
      await this.syncTo(result.node.id);
    });
  }

  async applySpark(sparkId: string): Promise<void> {
    const target = this.state.sparkMenuFor;
    if (target === null) return;
    await this.mutate(async () => {
      const result = await this.api.applySpark(this.sid(), target, sparkId);
      this.state = { ...this.state, sparkMenuFor: null, selected: [] };
      await this.syncTo(result.node.id);
    });
  }

  async mergeSelected(instruction: string): Promise<void> {
    if (!this.canMerge()) return;
    const [a, b] = this.state.selected;
    await this.mutate(async () => {
      const result = await this.api.merge(this.sid(), a, b, instruction);
      this.state = { ...this.state, selected: [] };
      await this.syncTo(result.node.id);
    });
  }

  async duplicateSelected(): Promise<void> {
    if (!this.canModify()) return;
    const [target] = this.state.selected;
    await this.mutate(async () => {
      await this.api.duplicate(this.sid(), target);
      await this.syncTo(this.state.activeId);
    });
  }

  async deleteSelected(recursive: boolean): Promise<void> {
    if (!this.canModify()) return;
    const [target] = this.state.selected;
    await this.mutate(async () => {
      await this.api.deleteNode(this.sid(), target, recursive);
      this.state = { ...this.state, selected: [] };
      const graph = await this.api.getGraph(this.sid());
      await this.syncTo(graph.active_id);
    });
  }
}
