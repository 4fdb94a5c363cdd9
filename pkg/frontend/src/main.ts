import { App } from "./app.js";

const container = document.getElementById("app");
if (!container) throw new Error("missing #app container");
new App(container);
