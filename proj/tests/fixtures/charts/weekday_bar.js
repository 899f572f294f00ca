const margin = { top: 20, right: 20, bottom: 40, left: 60 };
const order = ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"];
const totals = order.map(day => ({ day, usage: d3.sum(data.filter(d => d.Day_of_week === day), d => d.Usage_kWh) }));
const xScale = d3.scaleBand().domain(order).range([margin.left, vw - margin.right]).padding(0.15);
const yScale = d3.scaleLinear().domain([0, d3.max(totals, d => d.usage)]).nice().range([vh - margin.bottom, margin.top]);
const peak = d3.greatest(totals, d => d.usage);

svg.selectAll("rect")
  .data(totals)
  .enter()
  .append("rect")
  .attr("x", d => xScale(d.day))
  .attr("y", d => yScale(d.usage))
  .attr("width", xScale.bandwidth())
  .attr("height", d => yScale(0) - yScale(d.usage))
  .attr("fill", d => d === peak ? "#e6550d" : "#9ecae1");

svg.append("g").attr("transform", `translate(0,${vh - margin.bottom})`).call(d3.axisBottom(xScale));
svg.append("g").attr("transform", `translate(${margin.left},0)`).call(d3.axisLeft(yScale));
return { xScale, yScale };
