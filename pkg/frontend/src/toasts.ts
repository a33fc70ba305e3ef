// Notification queue for the corner of the dashboard: milestones as plain
// toasts, failures as error toasts, all dismissible, newest last.

export interface Toast {
  id: number;
  text: string;
  kind: "info" | "error";
}

export class ToastQueue {
  toasts: Toast[] = [];
  private nextId = 1;

  push(text: string, kind: "info" | "error" = "info"): Toast {
    const toast = { id: this.nextId++, text, kind };
    this.toasts.push(toast);
    return toast;
  }

  dismiss(id: number): void {
    this.toasts = this.toasts.filter((t) => t.id !== id);
  }

  trim(max: number): void {
    if (this.toasts.length > max) {
      this.toasts = this.toasts.slice(this.toasts.length - max);
    }
  }
}
