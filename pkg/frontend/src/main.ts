/** Browser entry point: mount the app on the served page. */

import { mountApp } from "./app.js";

const root = document.getElementById("app");
if (root) {
  mountApp(root);
}
